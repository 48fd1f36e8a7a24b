#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/matrix.hpp"
#include "simplexmc/meanfield.hpp"
#include "simplexmc/path.hpp"
#include "simplexmc/simplex.hpp"

namespace simplexmc {

enum class TableOrigin { ConstructedFromPath, EstimatedFromEnsemble };

/// A two-parameter family of transition matrices over a time grid, stored as
/// the per-step factors Q_{t_i, t_{i+1}}; spans are ordered factor products,
/// so the cocycle identity holds by construction. `transfer` records each
/// step's mass transfer: for constructed tables this is the transfer
/// accumulated along the path inside the step (its fine-partition supremum,
/// equal to the step's total variation), so the transfers sum to the path TV
/// on any grid; for estimated tables it is the observed end-to-end fraction
/// of sites that changed.
class SemigroupTable {
public:
  SemigroupTable(std::vector<double> grid, std::vector<StochasticMatrix> factors,
                 std::vector<double> transfer, TableOrigin origin,
                 std::optional<SimplexPoint> y0 = {});

  int dim() const { return factors_.empty() ? y0_ ? y0_->dim() : 0 : factors_.front().dim(); }
  int steps() const { return static_cast<int>(factors_.size()); }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<StochasticMatrix>& factors() const { return factors_; }
  const std::vector<double>& transfer() const { return transfer_; }
  TableOrigin origin() const { return origin_; }
  /// Marginal at grid.front(), when known (always set for constructed tables).
  const std::optional<SimplexPoint>& y0() const { return y0_; }

  /// Ordered product of the factors for steps [i, j).
  StochasticMatrix between(int i, int j) const;

private:
  std::vector<double> grid_;
  std::vector<StochasticMatrix> factors_;
  std::vector<double> transfer_;
  TableOrigin origin_;
  std::optional<SimplexPoint> y0_;
};

/// Minimal-flux rate matrix R(v, y): the unique generator supported on
/// loser rows (v_i < 0) with R(i,j) proportional to the gaining mass, built
/// so that y R = v while moving as little mass as possible. Requires
/// sum(v) = 0 (within 1e-12) and y_i > eps wherever v_i < 0.
GeneratorMatrix rate_matrix(const std::vector<double>& v, const SimplexPoint& y,
                            double eps = 1e-10);

/// Minimal transport for a jump y -> y2 in closed form: rows of colors that
/// gain (or hold) mass stay put; a losing row keeps y2_i/y_i of its mass and
/// spreads the rest across the gainers proportionally to their gains. Then
/// y Q = y2 and the transfer sum_i y_i (1 - Q(i,i)) equals tv(y, y2), which
/// is the least any coupling can move.
StochasticMatrix jump_transport_matrix(const SimplexPoint& y, const SimplexPoint& y2);

/// Transport along the straight segment from y0 to y1, built the way the
/// continuous construction prescribes: freeze R(v, y(u)) on sub-intervals of
/// the variation-parameterized segment, multiply the matrix exponentials,
/// and refine (midpoint rule, doubling) until the product moves less than
/// tol entrywise. Converges to the same matrix as jump_transport_matrix;
/// kept separate so the two routes can be checked against each other.
StochasticMatrix transport_linear(const SimplexPoint& y0, const SimplexPoint& y1,
                                  double tol = 1e-10);

/// Assemble the minimal compatible semigroup table of a path over a grid:
/// per step, the ordered product of jump transports (closed form) and
/// linear-piece transports (refined exponential products), with the step
/// transfers accumulated alongside.
SemigroupTable build_minimal_semigroup(const SimplexPath& p, std::vector<double> grid);

struct SemigroupCheckReport {
  double tol = 0.0;
  double cocycle_residual = 0.0;       // max |Q_{r,t} - Q_{r,s} Q_{s,t}| over sampled triples
  double compatibility_residual = 0.0; // max tv-style residual of Y_s Q_{s,t} vs Y_t
  double minimality_gap = 0.0;         // |sum of step transfers - path total variation|
  std::vector<std::array<int, 3>> subadditivity_violations; // grid indices (r, s, t)
  bool pass() const {
    return cocycle_residual <= tol && compatibility_residual <= tol && minimality_gap <= tol &&
           subadditivity_violations.empty();
  }
};

/// Audit a table against the path it claims to represent.
SemigroupCheckReport check_semigroup(const SemigroupTable& tab, const SimplexPath& p, double tol);

/// Drive n i.i.d. coordinates through the table: initial colors from y0,
/// then one row-multinomial transition per step, with flips recorded at the
/// step end times. Per-coordinate streams keep the result independent of the
/// worker count. Constructed tables insist on y0 matching their marginal.
EnsemblePath sample_inhomogeneous_chain(const SemigroupTable& tab, const SimplexPoint& y0, int n,
                                        std::uint64_t seed);

/// For a y-independent field the flow Q_{s,t} = exp((t-s) R_f) is
/// deterministic; this measures how well the grid family satisfies the
/// algebra: cocycle residual, equality of same-gap factors, approach to the
/// identity as the gap shrinks (gaps 1e-1, 1e-2, 1e-3), and agreement of the
/// flow with the integrated fluid limit.
struct FellerFlowReport {
  double cocycle_dev = 0.0;
  double stationarity_dev = 0.0;
  double identity_dev = 0.0;    // monotonicity defect of |Q_{0,gap} - I| as gap shrinks
  double ode_compat_dev = 0.0;  // max residual of y(s) exp((t-s) R_f) vs y(t)
  std::vector<double> shrink_gaps;
  std::vector<double> shrink_norms;
  bool pass(double tol = 1e-9) const {
    return cocycle_dev <= tol && stationarity_dev <= tol && identity_dev <= tol;
  }
};

FellerFlowReport feller_flow_check(const RateField& field, double horizon,
                                   std::vector<double> grid);

}
