#include <doctest.h>

#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "simplexmc/fixtures.hpp"
#include "simplexmc/projection.hpp"
#include "simplexmc/semigroup.hpp"

using namespace simplexmc;

TEST_CASE("the staircase clock hits its textbook values") {
  MonotoneClock c = MonotoneClock::cantor();
  CHECK(c.eval(0.0) == 0.0);
  CHECK(c.eval(1.0) == 1.0);
  CHECK(c.eval(-0.5) == 0.0);
  CHECK(c.eval(2.0) == 1.0);

  CHECK(c.eval(1.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c.eval(1.0 / 9.0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(c.eval(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(c.eval(0.5) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c.eval(2.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-9));

  // Flat on the removed middle third, yet still nondecreasing everywhere.
  CHECK(c.eval(0.4) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c.eval(0.6) == doctest::Approx(0.5).epsilon(1e-9));
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double v = c.eval(i / 100.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("clock inversion finds the first time at each level") {
  MonotoneClock c = MonotoneClock::cantor();
  CHECK(c.inverse(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(c.inverse(0.25) == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
  CHECK(c.inverse(0.0) == 0.0);
  CHECK(c.inverse(1.0) == 1.0);
  for (double u : {0.1, 0.37, 0.62, 0.9}) {
    CHECK(c.eval(c.inverse(u)) == doctest::Approx(u).epsilon(1e-8));
  }

  MonotoneClock id = MonotoneClock::identity();
  CHECK(id.eval(0.37) == 0.37);
  CHECK(id.inverse(0.37) == doctest::Approx(0.37).epsilon(1e-9));
}

TEST_CASE("piecewise clocks interpolate their knots and reject bad ones") {
  MonotoneClock t = MonotoneClock::table({0.0, 0.5, 1.0}, {0.0, 0.8, 1.0});
  CHECK(t.eval(0.25) == doctest::Approx(0.4));
  CHECK(t.eval(0.75) == doctest::Approx(0.9));
  CHECK(t.inverse(0.4) == doctest::Approx(0.25).epsilon(1e-9));

  CHECK_THROWS_AS(MonotoneClock::table({0.0, 1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneClock::table({0.1, 1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneClock::table({0.0, 1.0}, {0.0, 0.9}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneClock::table({0.0, 0.5, 0.5, 1.0}, {0.0, 0.2, 0.4, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MonotoneClock::table({0.0, 0.5, 1.0}, {0.0, 0.8, 0.7}), std::invalid_argument);
}

TEST_CASE("clock-driven flips reproduce the clock as a frequency") {
  EnsemblePath e = singular_clock_process(MonotoneClock::cantor(), 5000, 4);
  CHECK(e.horizon() == 1.0);
  for (const FlipEvent& ev : e.events()) {
    CHECK(ev.from == 0);
    CHECK(ev.to == 1);
  }
  // One flip per site at most; the frequency of color 1 tracks the clock.
  std::set<int> sites;
  for (const FlipEvent& ev : e.events()) CHECK(sites.insert(ev.site).second);

  MonotoneClock c = MonotoneClock::cantor();
  for (double t : {1.0 / 9.0, 1.0 / 3.0, 0.5, 2.0 / 3.0}) {
    CHECK(project_at(e, t)[1] == doctest::Approx(c.eval(t)).epsilon(0.1));
  }
}

TEST_CASE("threshold dynamics pull toward the initial majority side") {
  EnsemblePath up = threshold_process(0.75, 5000, 11, 2.0);
  CHECK(project_at(up, 0.0)[1] == doctest::Approx(0.75).epsilon(0.05));
  for (const FlipEvent& ev : up.events()) CHECK(ev.to == 1);
  // Mean one-frequency is y0 e^{-t} + (1 - e^{-t}) above the threshold.
  double want = 0.75 * std::exp(-1.0) + (1.0 - std::exp(-1.0));
  CHECK(project_at(up, 1.0)[1] == doctest::Approx(want).epsilon(0.05));

  EnsemblePath down = threshold_process(0.25, 5000, 11, 2.0);
  for (const FlipEvent& ev : down.events()) CHECK(ev.to == 0);
  CHECK(project_at(down, 1.0)[1] == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(0.3));

  // The two sides separate by far more than either moved.
  CHECK(project_at(up, 1.0)[1] - project_at(down, 1.0)[1] > 0.5);

  CHECK_THROWS_AS(threshold_process(1.5, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(threshold_process(0.5, 0, 0), std::invalid_argument);
}

TEST_CASE("the recoloring twins share marginals but not transports") {
  const int n = 2000;
  auto [x, z] = poisson_recolor_pair(n, 3.0, 6);
  CHECK(x.initial_colors() == z.initial_colors());

  std::vector<double> jumps;
  for (const FlipEvent& ev : x.events()) {
    if (jumps.empty() || jumps.back() != ev.t) jumps.push_back(ev.t);
  }
  REQUIRE(!jumps.empty());

  // Same jump times on both sides, through the shared clock.
  std::set<double> z_times;
  for (const FlipEvent& ev : z.events()) z_times.insert(ev.t);
  for (double t : jumps) CHECK(z_times.count(t) == 1);

  double prev = 0.0;
  for (double t : jumps) {
    CHECK(tv_distance(project_at(x, t), project_at(z, t)) < 0.08);

    StochasticMatrix qx = estimate_jump_transition(x, t);
    StochasticMatrix qz = estimate_jump_transition(z, t);
    double row_gap = 0.0;
    for (int i = 0; i < 2; ++i) {
      double g = std::max(std::abs(qx(i, 0) - qz(i, 0)), std::abs(qx(i, 1) - qz(i, 1)));
      row_gap = std::max(row_gap, g);
    }
    CHECK(row_gap > 0.15);

    CHECK(mass_transfer(x, prev, t) == doctest::Approx(1.0 / 3.0).epsilon(0.2));
    CHECK(mass_transfer(z, prev, t) == doctest::Approx(5.0 / 9.0).epsilon(0.2));
    prev = t;
  }
}

TEST_CASE("the degenerate twins share a constant marginal") {
  const double p = 0.25;
  auto [still, moving] = feller_degenerate_pair(p, 2000, 2.0, 9);
  CHECK(still.events().empty());
  CHECK_FALSE(moving.events().empty());

  for (double t : {0.0, 0.5, 1.5, 2.0}) {
    CHECK(project_at(still, t)[0] == doctest::Approx(p).epsilon(0.15));
    CHECK(tv_distance(project_at(still, t), project_at(moving, t)) < 0.05);
  }

  // Per jump: zeros move deterministically, ones stay with (1-2p)/(1-p).
  std::vector<double> jumps;
  for (const FlipEvent& ev : moving.events()) {
    if (jumps.empty() || jumps.back() != ev.t) jumps.push_back(ev.t);
  }
  double prev = 0.0;
  for (double t : jumps) {
    StochasticMatrix q = estimate_jump_transition(moving, t);
    CHECK(q(0, 1) == 1.0);
    CHECK(q(1, 0) == doctest::Approx(p / (1.0 - p)).epsilon(0.2));
    CHECK(mass_transfer(moving, prev, t) == doctest::Approx(2.0 * p).epsilon(0.2));
    prev = t;
  }

  CHECK_THROWS_AS(feller_degenerate_pair(0.0, 10, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(feller_degenerate_pair(0.5, 10, 1.0, 0), std::invalid_argument);
}

TEST_CASE("the path corpus is the advertised set") {
  std::vector<PathFixture> corpus = fixture_path_corpus();
  REQUIRE(corpus.size() == 7);
  const char* names[] = {"constant",    "linear_ramp",       "sine",  "cantor",
                         "single_jump", "alternating_jumps", "mixed_three_colors"};
  for (int i = 0; i < 7; ++i) {
    CHECK(corpus[i].name == names[i]);
    CHECK(corpus[i].path.horizon() == 1.0);
    CHECK(corpus[i].grid.front() == 0.0);
    CHECK(corpus[i].grid.back() == 1.0);
    CHECK(std::is_sorted(corpus[i].grid.begin(), corpus[i].grid.end()));
  }
  CHECK(corpus[6].path.dim() == 3);

  // The staircase polyline is monotone, so its variation telescopes to the
  // whole unit of mass even though it moves on a measure-zero set.
  const SimplexPath& cantor = corpus[3].path;
  CHECK(path_total_variation(cantor, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cantor.at(1.0)[1] == doctest::Approx(1.0));
}

TEST_CASE("corpus paths admit passing minimal tables") {
  std::vector<PathFixture> corpus = fixture_path_corpus();
  for (const char* name : {"constant", "single_jump", "mixed_three_colors"}) {
    auto it = std::find_if(corpus.begin(), corpus.end(),
                           [&](const PathFixture& f) { return f.name == name; });
    REQUIRE(it != corpus.end());
    SemigroupTable tab = build_minimal_semigroup(it->path, it->grid);
    SemigroupCheckReport rep = check_semigroup(tab, it->path, 1e-6);
    INFO(name);
    CHECK(rep.pass());
  }
}
