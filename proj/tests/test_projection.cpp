#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/projection.hpp"

using namespace simplexmc;

namespace {

// Four sites, fully scripted: site 0 flips up at 0.25, site 1 at 0.5, and
// sites 2 and 3 flip down together at 0.6. Every identity below is integer
// arithmetic by hand.
EnsemblePath scripted() {
  std::vector<FlipEvent> events = {
      {0.25, 0, 0, 1},
      {0.5, 1, 0, 1},
      {0.6, 2, 1, 0},
      {0.6, 3, 1, 0},
  };
  return EnsemblePath(2, 4, 1.0, {0, 0, 1, 1}, std::move(events), 5);
}

}

TEST_CASE("ensembles reject inconsistent replays") {
  CHECK_THROWS_AS(EnsemblePath(2, 2, 1.0, {0, 0}, {{0.5, 1, 1, 0}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(EnsemblePath(2, 2, 1.0, {0, 0}, {{0.5, 1, 0, 0}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(EnsemblePath(2, 2, 1.0, {0, 0}, {{0.6, 0, 0, 1}, {0.5, 1, 0, 1}}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(EnsemblePath(2, 2, 1.0, {0, 2}, {}, 0), std::invalid_argument);
  CHECK_THROWS_AS(EnsemblePath(2, 2, 1.0, {0, 0}, {{1.5, 0, 0, 1}}, 0), std::invalid_argument);
}

TEST_CASE("colors and counts are right-continuous with left limits") {
  EnsemblePath e = scripted();
  CHECK(e.colors_at(0.0) == std::vector<int>{0, 0, 1, 1});
  CHECK(e.colors_at(0.25) == std::vector<int>{1, 0, 1, 1});
  CHECK(e.colors_before(0.25) == std::vector<int>{0, 0, 1, 1});
  CHECK(e.colors_at(0.6) == std::vector<int>{1, 1, 0, 0});
  CHECK(e.colors_before(0.6) == std::vector<int>{1, 1, 1, 1});

  CHECK(e.counts_at(0.0) == std::vector<long long>{2, 2});
  CHECK(e.counts_at(0.55) == std::vector<long long>{0, 4});
  CHECK(e.counts_before(0.6) == std::vector<long long>{0, 4});
  CHECK(e.counts_at(1.0) == std::vector<long long>{2, 2});
}

TEST_CASE("projection divides exact integer counts") {
  EnsemblePath e = scripted();
  SimplexPoint right = project_at(e, 0.6, Side::Right);
  CHECK(right[0] == 0.5);
  CHECK(right[1] == 0.5);
  SimplexPoint left = project_at(e, 0.6, Side::Left);
  CHECK(left[0] == 0.0);
  CHECK(left[1] == 1.0);

  CHECK_THROWS_AS(project_at(e, 1.5, Side::Right), std::invalid_argument);
  CHECK_THROWS_AS(project_at(e, -0.1, Side::Right), std::invalid_argument);
}

TEST_CASE("projected paths are step functions covering the whole window") {
  EnsemblePath e = scripted();
  SimplexPath p = project(e, {0.25, 0.55, 0.6});
  CHECK(p.horizon() == 1.0);
  CHECK(p.at(0.0)[0] == 0.5);           // t = 0 is always included
  CHECK(p.at(0.25)[0] == 0.25);
  CHECK(p.at(0.55)[0] == 0.0);
  CHECK(p.at(0.6)[0] == 0.5);
  CHECK(p.at(0.4)[0] == 0.25);          // holds the last requested value
  CHECK(p.left_limit(0.55)[0] == 0.25);

  SimplexPath lp = project(e, {0.6}, Side::Left);
  CHECK(lp.at(0.6)[0] == 0.0);
}

TEST_CASE("pair counts satisfy the integer marginal identities") {
  EnsemblePath e = scripted();
  std::vector<long long> pairs = pair_counts(e, 0.0, 1.0);
  CHECK(pairs == std::vector<long long>{0, 2, 2, 0});

  // Row sums reproduce the counts at s, column sums the counts at t.
  std::vector<long long> at_s = e.counts_at(0.0);
  std::vector<long long> at_t = e.counts_at(1.0);
  for (int i = 0; i < 2; ++i) {
    CHECK(pairs[2 * i] + pairs[2 * i + 1] == at_s[i]);
    CHECK(pairs[i] + pairs[2 + i] == at_t[i]);
  }

  CHECK(pair_counts(e, 0.25, 0.55) == std::vector<long long>{0, 1, 0, 3});
  CHECK_THROWS_AS(pair_counts(e, 0.7, 0.2), std::invalid_argument);
}

TEST_CASE("transition estimates divide rows and fall back to deltas") {
  EnsemblePath e = scripted();
  StochasticMatrix q = estimate_transition(e, 0.0, 1.0);
  CHECK(q(0, 0) == 0.0);
  CHECK(q(0, 1) == 1.0);
  CHECK(q(1, 0) == 1.0);
  CHECK(q(1, 1) == 0.0);

  // Between 0.55 and 0.58 nothing moves and color 0 is empty, so the
  // estimate is the identity with a delta row standing in for row 0.
  StochasticMatrix idle = estimate_transition(e, 0.55, 0.58);
  CHECK(idle.max_abs_diff(StochasticMatrix::identity(2)) == 0.0);
}

TEST_CASE("jump transitions read the instant across t") {
  EnsemblePath e = scripted();
  StochasticMatrix q = estimate_jump_transition(e, 0.6);
  CHECK(q(0, 0) == 1.0);   // delta row: color 0 was empty just before
  CHECK(q(1, 0) == 0.5);
  CHECK(q(1, 1) == 0.5);

  StochasticMatrix single = estimate_jump_transition(e, 0.25);
  CHECK(single(0, 1) == 0.5);
  CHECK(single(1, 1) == 1.0);
}

TEST_CASE("mass transfer counts changed sites") {
  EnsemblePath e = scripted();
  CHECK(mass_transfer(e, 0.0, 1.0) == 1.0);
  CHECK(mass_transfer(e, 0.25, 0.55) == 0.25);
  CHECK(mass_transfer(e, 0.55, 0.58) == 0.0);
}

TEST_CASE("empirical tables carry marginals, factors, and support masks") {
  EnsemblePath e = scripted();
  EmpiricalSemigroup emp = empirical_semigroup(e, {0.0, 0.5, 1.0});
  REQUIRE(emp.marginals.size() == 3);
  REQUIRE(emp.factors.size() == 2);

  CHECK(emp.marginals[0][0] == 0.5);
  CHECK(emp.marginals[1][1] == 1.0);
  CHECK(emp.marginals[2][0] == 0.5);

  CHECK(emp.factors[0](0, 1) == 1.0);
  CHECK(emp.factors[1](1, 0) == 0.5);

  CHECK(emp.supported[0] == std::vector<char>{1, 1});
  CHECK(emp.supported[1] == std::vector<char>{0, 1});

  CHECK_THROWS_AS(empirical_semigroup(e, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(empirical_semigroup(e, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("discontinuity classification separates bulk moves from singles") {
  EnsemblePath e = scripted();
  DiscontinuityReport rep = classify_discontinuities(e, 0.5);
  REQUIRE(rep.entries.size() == 3);

  CHECK(rep.entries[0].t == 0.25);
  CHECK_FALSE(rep.entries[0].type2);
  CHECK_FALSE(rep.entries[0].multi_warning);
  CHECK(rep.entries[0].sites == std::vector<int>{0});
  CHECK_FALSE(rep.entries[0].jump.has_value());

  const Discontinuity& bulk = rep.entries[2];
  CHECK(bulk.t == 0.6);
  CHECK(bulk.type2);
  CHECK(bulk.sites == std::vector<int>{2, 3});
  REQUIRE(bulk.jump.has_value());
  CHECK((*bulk.jump)(1, 0) == 0.5);
  REQUIRE(bulk.pre.has_value());
  CHECK((*bulk.pre)[1] == 1.0);
  REQUIRE(bulk.post.has_value());
  CHECK((*bulk.post)[0] == 0.5);

  CHECK_THROWS_AS(classify_discontinuities(e, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify_discontinuities(e, 1.5), std::invalid_argument);
}

TEST_CASE("small simultaneous groups only raise a warning at large n") {
  // 100 sites, two of which move together: below the type-II threshold of
  // ceil(0.05 * 100) = 5, so the time is flagged but not classified.
  std::vector<int> x0(100, 0);
  std::vector<FlipEvent> events = {{0.5, 0, 0, 1}, {0.5, 1, 0, 1}};
  EnsemblePath e(2, 100, 1.0, std::move(x0), std::move(events), 0);

  DiscontinuityReport rep = classify_discontinuities(e, 0.05);
  REQUIRE(rep.entries.size() == 1);
  CHECK_FALSE(rep.entries[0].type2);
  CHECK(rep.entries[0].multi_warning);
  CHECK(rep.entries[0].sites.size() == 2);
}
