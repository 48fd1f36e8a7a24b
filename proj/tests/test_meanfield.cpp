#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "simplexmc/meanfield.hpp"
#include "simplexmc/parallel.hpp"
#include "simplexmc/projection.hpp"

using namespace simplexmc;

TEST_CASE("constant fields report their rates and constancy") {
  RateField f = RateField::constant(2, {0.0, 1.5, 0.5, 0.0});
  SimplexPoint y({0.3, 0.7});
  CHECK(f.eval(0, 1, y) == 1.5);
  CHECK(f.eval(1, 0, y) == 0.5);
  CHECK(f.is_constant());
  CHECK(f.sup_bound(0, 1) == 1.5);
  CHECK(f.total_sup() == doctest::Approx(2.0));
}

TEST_CASE("rates above the declared envelope are an error, not a clamp") {
  RateField lying(2, [](int, int, const SimplexPoint&) { return 2.0; }, 0.0,
                  {0.0, 1.0, 1.0, 0.0});
  CHECK_THROWS_AS(lying.eval(0, 1, SimplexPoint({0.5, 0.5})), std::runtime_error);

  RateField negative(2, [](int, int, const SimplexPoint&) { return -0.1; }, 0.0,
                     {0.0, 1.0, 1.0, 0.0});
  CHECK_THROWS_AS(negative.eval(0, 1, SimplexPoint({0.5, 0.5})), std::runtime_error);
}

TEST_CASE("spin flip rates follow the magnetization") {
  RateField f = glauber_field(IsingParams{1.0, 0.0, 1.0});
  SimplexPoint y({0.25, 0.75});
  // Magnetization m = y_+ - y_- = 1/2, so up-flips run at e^{1/2} and
  // down-flips at e^{-1/2}.
  CHECK(f.eval(0, 1, y) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  CHECK(f.eval(1, 0, y) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK_FALSE(f.is_constant());

  // With no coupling the field is flat in y.
  RateField flat = glauber_field(IsingParams{1.0, 0.3, 0.0});
  CHECK(flat.is_constant());
}

TEST_CASE("epidemic rates gate infection on the infective fraction") {
  RateField f = reed_frost_field(ReedFrostParams{2.0, 0.7});
  SimplexPoint y({0.5, 0.3, 0.2});
  CHECK(f.eval(0, 1, y) == doctest::Approx(2.0 * 0.3));
  CHECK(f.eval(1, 2, y) == doctest::Approx(0.7));
  CHECK(f.eval(0, 2, y) == 0.0);
  CHECK(f.eval(2, 0, y) == 0.0);
  CHECK(f.eval(2, 1, y) == 0.0);
  CHECK(f.eval(1, 0, y) == 0.0);
}

TEST_CASE("the fluid limit matches the two-state closed form") {
  // Symmetric flipping at unit rate from a pure state: the one-fraction is
  // y_1(t) = (1 - e^{-2t}) / 2.
  RateField f = RateField::constant(2, {0.0, 1.0, 1.0, 0.0});
  std::vector<double> knots = {0.5, 1.0, 2.0};
  SimplexPath p = solve_ode(f, SimplexPoint({1.0, 0.0}), 2.0, 1e-10, knots);
  for (double t : knots) {
    double want = 0.5 * (1.0 - std::exp(-2.0 * t));
    CHECK(p.at(t)[1] == doctest::Approx(want).epsilon(1e-8));
  }
  CHECK(p.at(0.0)[0] == 1.0);
}

TEST_CASE("the fluid limit holds still at a stationary point") {
  RateField f = glauber_field(IsingParams{1.0, 0.0, 1.0});
  SimplexPath p = solve_ode(f, SimplexPoint({0.5, 0.5}), 3.0, 1e-10, {1.0, 3.0});
  CHECK(p.at(1.0)[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(p.at(3.0)[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("finite simulations replay exactly under one seed") {
  RateField f = glauber_field(IsingParams{0.8, 0.1, 0.5});
  EnsemblePath a = simulate_finite(f, 50, SimplexPoint({0.6, 0.4}), 1.5, 99);
  EnsemblePath b = simulate_finite(f, 50, SimplexPoint({0.6, 0.4}), 1.5, 99);
  REQUIRE(a.events().size() == b.events().size());
  CHECK(a.initial_colors() == b.initial_colors());
  for (std::size_t i = 0; i < a.events().size(); ++i) {
    CHECK(a.events()[i].t == b.events()[i].t);
    CHECK(a.events()[i].site == b.events()[i].site);
    CHECK(a.events()[i].from == b.events()[i].from);
    CHECK(a.events()[i].to == b.events()[i].to);
  }

  EnsemblePath c = simulate_finite(f, 50, SimplexPoint({0.6, 0.4}), 1.5, 100);
  bool identical = a.events().size() == c.events().size() && a.initial_colors() == c.initial_colors();
  CHECK_FALSE(identical);
}

TEST_CASE("finite simulation from explicit colors keeps them at t = 0") {
  RateField f = RateField::constant(2, {0.0, 1.0, 1.0, 0.0});
  std::vector<int> x0 = {0, 0, 1, 0, 1};
  EnsemblePath e = simulate_finite(f, 5, x0, 0.5, 11);
  CHECK(e.colors_at(0.0) == x0);
  CHECK(e.n() == 5);
  CHECK(e.horizon() == 0.5);
  for (const FlipEvent& ev : e.events()) {
    CHECK(ev.t > 0.0);
    CHECK(ev.t <= 0.5);
    CHECK(ev.from != ev.to);
  }
}

TEST_CASE("finite frequencies track the fluid limit at moderate size") {
  RateField f = glauber_field(IsingParams{0.5, 0.0, 1.0});
  SimplexPoint y0({0.9, 0.1});
  const double horizon = 1.0;
  EnsemblePath e = simulate_finite(f, 4000, y0, horizon, 12345);
  SimplexPath ode = solve_ode(f, y0, horizon, 1e-9, {0.5, 1.0});
  for (double t : {0.5, 1.0}) {
    CHECK(tv_distance(project_at(e, t), ode.at(t)) < 0.05);
  }
}

TEST_CASE("limit ensembles do not depend on the worker budget") {
  RateField f = RateField::constant(2, {0.0, 1.0, 1.0, 0.0});
  int saved = max_threads();

  set_max_threads(1);
  EnsemblePath one = simulate_limit(f, 300, SimplexPoint({1.0, 0.0}), 1.0, 1e-8, 2024);
  set_max_threads(4);
  EnsemblePath four = simulate_limit(f, 300, SimplexPoint({1.0, 0.0}), 1.0, 1e-8, 2024);
  set_max_threads(saved);

  CHECK(one.initial_colors() == four.initial_colors());
  REQUIRE(one.events().size() == four.events().size());
  for (std::size_t i = 0; i < one.events().size(); ++i) {
    CHECK(one.events()[i].t == four.events()[i].t);
    CHECK(one.events()[i].site == four.events()[i].site);
    CHECK(one.events()[i].to == four.events()[i].to);
  }
}

TEST_CASE("limit frequencies stay near the deterministic path") {
  RateField f = RateField::constant(2, {0.0, 1.0, 1.0, 0.0});
  SimplexPoint y0({1.0, 0.0});
  EnsemblePath e = simulate_limit(f, 4000, y0, 1.0, 1e-9, 777);
  SimplexPath ode = solve_ode(f, y0, 1.0, 1e-9, {0.25, 0.5, 1.0});
  for (double t : {0.25, 0.5, 1.0}) {
    CHECK(tv_distance(project_at(e, t), ode.at(t)) < 0.05);
  }
}

TEST_CASE("estimated envelopes still bind during evaluation") {
  RateField f = RateField::with_estimated_bounds(
      2, [](int from, int, const SimplexPoint& y) { return from == 0 ? y[1] : 0.25; }, 1.0);
  SimplexPoint y({0.5, 0.5});
  CHECK(f.eval(0, 1, y) == doctest::Approx(0.5));
  CHECK(f.sup_bound(0, 1) >= 0.5);
  CHECK(f.sup_bound(1, 0) >= 0.25);
}
