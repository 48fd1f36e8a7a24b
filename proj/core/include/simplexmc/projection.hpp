#pragma once

#include <optional>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/matrix.hpp"
#include "simplexmc/path.hpp"
#include "simplexmc/simplex.hpp"

namespace simplexmc {

/// Which side of t to read when a flip lands exactly there.
enum class Side { Right, Left };

/// Occupancy fractions at one time. Counting is integer-exact; only the final
/// division produces reals.
SimplexPoint project_at(const EnsemblePath& e, double t, Side side = Side::Right);

/// Step path through the occupancy fractions at the requested times (plus
/// t = 0, so the path covers [0, horizon]). Times are sorted and deduplicated.
SimplexPath project(const EnsemblePath& e, std::vector<double> times, Side side = Side::Right);

/// Pairwise integer counts n_{ij} = #{sites colored i at s and j at t}.
std::vector<long long> pair_counts(const EnsemblePath& e, double s, double t);

/// Empirical transition matrix between s and t <= horizon, s <= t: row i is
/// n_{ij} / n_i. Rows with no mass at s follow the delta convention (row i is
/// the point mass at i), so the result is always a valid stochastic matrix.
StochasticMatrix estimate_transition(const EnsemblePath& e, double s, double t);

/// Transition across the instant t: from colors just before t to colors at t.
StochasticMatrix estimate_jump_transition(const EnsemblePath& e, double t);

/// Fraction of sites whose colors at s and t differ.
double mass_transfer(const EnsemblePath& e, double s, double t);

/// Marginals, per-step transition estimates, and support masks over a grid.
struct EmpiricalSemigroup {
  std::vector<double> grid;
  std::vector<SimplexPoint> marginals;        // one per grid time
  std::vector<StochasticMatrix> factors;      // one per consecutive pair
  std::vector<std::vector<char>> supported;   // supported[g][color]: count > 0 at grid[g]
};
EmpiricalSemigroup empirical_semigroup(const EnsemblePath& e, std::vector<double> grid);

/// A time at which sites flipped. Isolated flips are type I; times where at
/// least max(2, ceil(theta * n)) sites move together are type II and carry
/// the empirical jump matrix with the surrounding marginals. Simultaneous
/// groups too small for type II keep kind type I but raise `multi_warning`,
/// since at finite n they may be either coincidence or an undersampled jump.
struct Discontinuity {
  double t = 0.0;
  bool type2 = false;
  bool multi_warning = false;
  std::vector<int> sites;
  std::optional<StochasticMatrix> jump;
  std::optional<SimplexPoint> pre, post;
};

struct DiscontinuityReport {
  double theta = 0.0;
  std::vector<Discontinuity> entries;
};

DiscontinuityReport classify_discontinuities(const EnsemblePath& e, double theta = 0.05);

}
