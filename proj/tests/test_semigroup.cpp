#include <doctest.h>

#include <stdexcept>
#include <array>
#include <cmath>
#include <vector>

#include "simplexmc/parallel.hpp"
#include "simplexmc/projection.hpp"
#include "simplexmc/semigroup.hpp"

using namespace simplexmc;

namespace {

SimplexPath ramp_path() {
  return SimplexPath::from_samples(
      {{0.0, SimplexPoint({0.8, 0.2})}, {1.0, SimplexPoint({0.2, 0.8})}},
      SimplexPath::Interp::Linear, 1.0);
}

}

TEST_CASE("the minimal-flux generator moves the prescribed direction") {
  SimplexPoint y({0.5, 0.3, 0.2});
  std::vector<double> v = {-0.3, 0.1, 0.2};
  GeneratorMatrix r = rate_matrix(v, y);

  CHECK(r(0, 0) == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(r(0, 1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r(0, 2) == doctest::Approx(0.4).epsilon(1e-12));
  for (int j = 0; j < 3; ++j) {
    CHECK(r(1, j) == 0.0);
    CHECK(r(2, j) == 0.0);
  }

  // y R recovers v, which is the whole point of the construction.
  for (int j = 0; j < 3; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += y[i] * r(i, j);
    CHECK(acc == doctest::Approx(v[j]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(rate_matrix({-0.3, 0.1, 0.1}, y), std::invalid_argument);
  CHECK_THROWS_AS(rate_matrix({-0.1, 0.1, 0.0}, SimplexPoint({0.0, 0.5, 0.5})),
                  std::invalid_argument);
}

TEST_CASE("jump transport has the closed form and the exact transfer") {
  SimplexPoint y({0.8, 0.2}), y2({0.2, 0.8});
  StochasticMatrix q = jump_transport_matrix(y, y2);
  CHECK(q(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(q(1, 0) == 0.0);
  CHECK(q(1, 1) == 1.0);

  SimplexPoint pushed = apply(y, q);
  CHECK(tv_distance(pushed, y2) < 1e-15);

  // The diagonal leak equals tv(y, y2): no coupling moves less.
  double transfer = 0.0;
  for (int i = 0; i < 2; ++i) transfer += y[i] * (1.0 - q(i, i));
  CHECK(transfer == doctest::Approx(tv_distance(y, y2)).epsilon(1e-14));

  CHECK(jump_transport_matrix(y, y).max_abs_diff(StochasticMatrix::identity(2)) == 0.0);
}

TEST_CASE("jump transport spreads spill proportionally to the gains") {
  SimplexPoint y({0.5, 0.3, 0.2}), y2({0.2, 0.5, 0.3});
  StochasticMatrix q = jump_transport_matrix(y, y2);
  CHECK(q(0, 0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(q(0, 2) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(q(1, 1) == 1.0);
  CHECK(q(2, 2) == 1.0);

  CHECK(tv_distance(apply(y, q), y2) < 1e-15);

  double transfer = 0.0;
  for (int i = 0; i < 3; ++i) transfer += y[i] * (1.0 - q(i, i));
  CHECK(transfer == doctest::Approx(tv_distance(y, y2)).epsilon(1e-14));

  CHECK_THROWS_AS(jump_transport_matrix(SimplexPoint({0.0, 1.0}), SimplexPoint({0.0, 0.5})),
                  std::invalid_argument);
}

TEST_CASE("integrating the generator along a segment lands on the jump transport") {
  // The two constructions are provably the same matrix; the integration
  // route must reproduce the closed form, not just something compatible.
  SimplexPoint a2({0.8, 0.2}), b2({0.2, 0.8});
  CHECK(transport_linear(a2, b2).max_abs_diff(jump_transport_matrix(a2, b2)) < 1e-8);

  SimplexPoint a3({0.5, 0.3, 0.2}), b3({0.2, 0.5, 0.3});
  CHECK(transport_linear(a3, b3).max_abs_diff(jump_transport_matrix(a3, b3)) < 1e-8);

  CHECK(transport_linear(a3, a3).max_abs_diff(StochasticMatrix::identity(3)) == 0.0);
}

TEST_CASE("tables validate their grid and compose spans in order") {
  SimplexPoint lo({1.0 / 3.0, 2.0 / 3.0}), hi({2.0 / 3.0, 1.0 / 3.0});
  StochasticMatrix up = jump_transport_matrix(lo, hi);
  StochasticMatrix down = jump_transport_matrix(hi, lo);
  SemigroupTable tab({0.0, 0.25, 0.5}, {up, down}, {1.0 / 3.0, 1.0 / 3.0},
                     TableOrigin::ConstructedFromPath, lo);

  StochasticMatrix both = tab.between(0, 2);
  CHECK(both(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(both(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(both(1, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(both(1, 1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(tab.between(1, 1).max_abs_diff(StochasticMatrix::identity(2)) == 0.0);

  CHECK_THROWS_AS(tab.between(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(SemigroupTable({0.5, 0.5}, {up}, {0.0}, TableOrigin::ConstructedFromPath),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemigroupTable({0.0, 0.5}, {up}, {0.0, 0.1}, TableOrigin::ConstructedFromPath),
                  std::invalid_argument);
  CHECK_THROWS_AS(SemigroupTable({0.0, 0.5}, {up}, {-0.1}, TableOrigin::ConstructedFromPath),
                  std::invalid_argument);
}

TEST_CASE("building over a ramp reproduces the closed-form factor") {
  SemigroupTable tab = build_minimal_semigroup(ramp_path(), {0.0, 1.0});
  REQUIRE(tab.steps() == 1);
  CHECK(tab.origin() == TableOrigin::ConstructedFromPath);
  REQUIRE(tab.y0().has_value());
  CHECK((*tab.y0())[0] == doctest::Approx(0.8));

  const StochasticMatrix& q = tab.factors()[0];
  CHECK(q(0, 0) == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(q(0, 1) == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(q(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(tab.transfer()[0] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("refining the grid multiplies down to the same transport") {
  SemigroupTable whole = build_minimal_semigroup(ramp_path(), {0.0, 1.0});
  SemigroupTable halves = build_minimal_semigroup(ramp_path(), {0.0, 0.5, 1.0});
  CHECK(halves.between(0, 2).max_abs_diff(whole.factors()[0]) < 1e-6);
  double total = halves.transfer()[0] + halves.transfer()[1];
  CHECK(total == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("building over jumps uses the closed form per jump") {
  SimplexPath p = SimplexPath::Builder(SimplexPoint({1.0, 0.0}))
                      .hold_until(0.5)
                      .jump_to(SimplexPoint({0.0, 1.0}))
                      .finish(1.0);
  SemigroupTable tab = build_minimal_semigroup(p, {0.0, 0.5, 1.0});
  REQUIRE(tab.steps() == 2);
  CHECK(tab.factors()[0](0, 1) == 1.0);
  CHECK(tab.factors()[0](1, 1) == 1.0);
  CHECK(tab.factors()[1].max_abs_diff(StochasticMatrix::identity(2)) == 0.0);
  CHECK(tab.transfer()[0] == doctest::Approx(1.0));
  CHECK(tab.transfer()[1] == 0.0);
}

TEST_CASE("alternating jumps accumulate transfer beyond the net movement") {
  SimplexPoint lo({1.0 / 3.0, 2.0 / 3.0}), hi({2.0 / 3.0, 1.0 / 3.0});
  SimplexPath p = SimplexPath::Builder(lo)
                      .hold_until(0.25)
                      .jump_to(hi)
                      .hold_until(0.5)
                      .jump_to(lo)
                      .hold_until(0.75)
                      .jump_to(hi)
                      .finish(1.0);
  SemigroupTable tab = build_minimal_semigroup(p, {0.0, 0.25, 0.5, 0.75, 1.0});
  REQUIRE(tab.steps() == 4);
  for (int s = 0; s < 3; ++s) CHECK(tab.transfer()[s] == doctest::Approx(1.0 / 3.0));
  CHECK(tab.transfer()[3] == 0.0);

  // The summed transfers equal the path variation even though the path ends
  // only one third away from where it started.
  CHECK(path_total_variation(p, 0.0, 1.0) == doctest::Approx(1.0));
  CHECK(tv_distance(p.at(0.0), p.at(1.0)) == doctest::Approx(1.0 / 3.0));

  SemigroupCheckReport rep = check_semigroup(tab, p, 1e-6);
  CHECK(rep.pass());
  CHECK(rep.cocycle_residual <= 1e-12);
}

TEST_CASE("checks pass on honest tables and localize dishonest ones") {
  SimplexPath p = ramp_path();
  SemigroupTable good = build_minimal_semigroup(p, {0.0, 0.25, 0.5, 0.75, 1.0});
  SemigroupCheckReport rep = check_semigroup(good, p, 1e-6);
  CHECK(rep.pass());
  CHECK(rep.compatibility_residual <= 1e-8);
  CHECK(rep.minimality_gap <= 1e-9);
  CHECK(rep.subadditivity_violations.empty());

  // Swap one factor for the identity: the marginals stop matching and the
  // recorded transfers no longer reach the path's variation.
  std::vector<StochasticMatrix> factors = good.factors();
  factors[1] = StochasticMatrix::identity(2);
  std::vector<double> transfer = good.transfer();
  transfer[1] = 0.0;
  SemigroupTable bad(good.grid(), std::move(factors), std::move(transfer),
                     TableOrigin::ConstructedFromPath, *good.y0());
  SemigroupCheckReport bad_rep = check_semigroup(bad, p, 1e-6);
  CHECK_FALSE(bad_rep.pass());
  CHECK(bad_rep.compatibility_residual > 0.1);
  CHECK(bad_rep.minimality_gap > 0.1);
}

TEST_CASE("net transfers that break subadditivity are reported by triple") {
  // Factor B claims motion out of a color that factor A never routed mass
  // into, so the implied net transfer over the whole span exceeds the two
  // halves combined.
  SimplexPath p = SimplexPath::from_samples(
      {{0.0, SimplexPoint({0.5, 0.5})}, {0.5, SimplexPoint({1.0, 0.0})}},
      SimplexPath::Interp::Step, 1.0);
  StochasticMatrix stay = StochasticMatrix::identity(2);
  StochasticMatrix collapse(2, {1.0, 0.0, 1.0, 0.0});
  SemigroupTable tab({0.0, 0.5, 1.0}, {stay, collapse}, {0.0, 0.0},
                     TableOrigin::EstimatedFromEnsemble);

  SemigroupCheckReport rep = check_semigroup(tab, p, 1e-6);
  CHECK_FALSE(rep.pass());
  REQUIRE_FALSE(rep.subadditivity_violations.empty());
  std::array<int, 3> worst = rep.subadditivity_violations.front();
  CHECK(worst == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("sampling a table reproduces its marginals and grid times") {
  SimplexPath p = ramp_path();
  SemigroupTable tab = build_minimal_semigroup(p, {0.0, 0.5, 1.0});
  EnsemblePath e = sample_inhomogeneous_chain(tab, *tab.y0(), 4000, 31);

  CHECK(e.n() == 4000);
  CHECK(e.horizon() == 1.0);
  for (const FlipEvent& ev : e.events()) {
    CHECK((ev.t == 0.5 || ev.t == 1.0));
  }
  for (double t : {0.0, 0.5, 1.0}) {
    CHECK(tv_distance(project_at(e, t), p.at(t)) < 0.05);
  }

  CHECK_THROWS_AS(sample_inhomogeneous_chain(tab, SimplexPoint({0.5, 0.5}), 100, 1),
                  std::invalid_argument);

  SemigroupTable off_origin = build_minimal_semigroup(p, {0.25, 1.0});
  CHECK_THROWS_AS(sample_inhomogeneous_chain(off_origin, *off_origin.y0(), 100, 1),
                  std::invalid_argument);
}

TEST_CASE("estimated tables sample from any starting marginal") {
  SemigroupTable tab({0.0, 1.0}, {StochasticMatrix(2, {0.25, 0.75, 0.0, 1.0})}, {0.6},
                     TableOrigin::EstimatedFromEnsemble);
  EnsemblePath e = sample_inhomogeneous_chain(tab, SimplexPoint({0.8, 0.2}), 2000, 8);
  CHECK(tv_distance(project_at(e, 1.0), SimplexPoint({0.2, 0.8})) < 0.05);
}

TEST_CASE("chains sampled from tables ignore the worker budget") {
  SimplexPath p = ramp_path();
  SemigroupTable tab = build_minimal_semigroup(p, {0.0, 0.5, 1.0});
  int saved = max_threads();

  set_max_threads(1);
  EnsemblePath one = sample_inhomogeneous_chain(tab, *tab.y0(), 500, 77);
  set_max_threads(3);
  EnsemblePath three = sample_inhomogeneous_chain(tab, *tab.y0(), 500, 77);
  set_max_threads(saved);

  CHECK(one.initial_colors() == three.initial_colors());
  REQUIRE(one.events().size() == three.events().size());
  for (std::size_t i = 0; i < one.events().size(); ++i) {
    CHECK(one.events()[i].t == three.events()[i].t);
    CHECK(one.events()[i].site == three.events()[i].site);
    CHECK(one.events()[i].to == three.events()[i].to);
  }
}

TEST_CASE("constant-rate flows satisfy the deterministic algebra") {
  RateField f = RateField::constant(2, {0.0, 2.0, 1.0, 0.0});
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.1 * i);
  FellerFlowReport rep = feller_flow_check(f, 1.0, grid);

  CHECK(rep.pass(1e-9));
  CHECK(rep.ode_compat_dev <= 1e-6);
  REQUIRE(rep.shrink_norms.size() == 3);
  CHECK(rep.shrink_norms[0] > rep.shrink_norms[1]);
  CHECK(rep.shrink_norms[1] > rep.shrink_norms[2]);
  CHECK(rep.shrink_norms[2] < 0.01);

  RateField depends = glauber_field(IsingParams{1.0, 0.0, 1.0});
  CHECK_THROWS_AS(feller_flow_check(depends, 1.0, {0.0, 0.5, 1.0}), std::invalid_argument);
}
