#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/matrix.hpp"
#include "simplexmc/rng.hpp"
#include "simplexmc/simplex.hpp"

namespace simplexmc {

/// A law on stochastic matrices. `fn` may read the current empirical marginal
/// (environments that react to the crowd) or ignore it. Draws are validated
/// for dimension; row-stochasticity is enforced by StochasticMatrix itself.
class MatrixLawSampler {
public:
  using DrawFn = std::function<StochasticMatrix(const SimplexPoint&, Rng&)>;

  MatrixLawSampler(int k, DrawFn fn, std::string description);

  int dim() const { return k_; }
  const std::string& description() const { return desc_; }
  StochasticMatrix draw(const SimplexPoint& y, Rng& rng) const;

  /// Degenerate law: every step draws the identity (a frozen chain).
  static MatrixLawSampler identity(int k);
  /// Degenerate law: every step draws the same matrix.
  static MatrixLawSampler fixed(StochasticMatrix q);
  /// Finite mixture: step matrices picked by weight, independent of y.
  static MatrixLawSampler mixture(std::vector<StochasticMatrix> choices,
                                  std::vector<double> weights);

private:
  int k_;
  DrawFn fn_;
  std::string desc_;
};

/// Everything a run of the discrete chain produces besides the event log:
/// the drawn environment and the empirical marginals it steered.
struct DiscreteTrace {
  int k;
  SimplexPoint y0;                     // law the initial colors were drawn from
  std::vector<SimplexPoint> marginals; // empirical, one per step boundary (steps + 1)
  std::vector<StochasticMatrix> drawn; // environment matrices, one per step
  std::vector<std::vector<int>> colors; // full color rows when recording was requested
};

/// Run n exchangeable coordinates for `steps` steps: draw Q_m from the law
/// (seeded per step), then move every coordinate by its own row-categorical.
/// Flips land at integer times 1..steps, so the ensemble's horizon is
/// `steps`. Coordinate c uses stream(seed, kCoordinate, c) across all steps,
/// which keeps the run bit-identical under any worker count.
std::pair<DiscreteTrace, EnsemblePath> simulate_discrete(const MatrixLawSampler& law,
                                                         const SimplexPoint& y0, int n, int steps,
                                                         std::uint64_t seed,
                                                         bool record_colors = false);

/// Exactness audit of a trace against its event log. The marginal and
/// recursion deviations are integer identities in disguise and must come out
/// exactly zero; the environment gap is noise-scaled (multiplied by the
/// square root of the row's occupancy) so a single threshold of 5 covers
/// rows thick and thin.
struct DiscreteCheckReport {
  double marginal_dev = 0.0;  // trace marginals vs counts replayed from events
  double recursion_dev = 0.0; // occupancy vs column sums of the step's pair counts
  double qhat_dev = 0.0;      // max sqrt(occupancy) * |Qhat row - drawn row|
  bool delta_rows_ok = true;  // unoccupied colors must estimate as stay-put rows
  bool pass() const {
    return marginal_dev == 0.0 && recursion_dev == 0.0 && qhat_dev <= 5.0 && delta_rows_ok;
  }
};

DiscreteCheckReport verify_discrete(const DiscreteTrace& trace, const EnsemblePath& e);

}
