#pragma once

#include <cstdint>
#include <vector>

namespace simplexmc {

/// Largest supported number of colors. Everything in this library is dense
/// k x k arithmetic; beyond this the design assumptions stop making sense.
inline constexpr int kMaxColors = 64;

class StochasticMatrix;

/// A probability vector over k colors. Construction accepts raw weights whose
/// sum deviates from 1 by less than 1e-9 and renormalizes them; anything
/// further off is rejected as a real error rather than silently fixed.
class SimplexPoint {
public:
  explicit SimplexPoint(std::vector<double> weights);

  static SimplexPoint uniform(int k);
  static SimplexPoint delta(int k, int color);
  /// Occupancy fractions n_i / n from integer counts (n = sum > 0).
  static SimplexPoint from_counts(const std::vector<long long>& counts);

  int dim() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }

  bool operator==(const SimplexPoint&) const = default;

private:
  std::vector<double> w_;
};

/// Total variation distance, half-L1 convention: tv(a,b) = (1/2) sum |a-b|.
/// This is the normalization under which one whole jump has size 1 and the
/// minimal-transfer identities below are exact. l1_distance is the raw sum.
double tv_distance(const SimplexPoint& a, const SimplexPoint& b);
double l1_distance(const SimplexPoint& a, const SimplexPoint& b);

/// Row action y * Q.
SimplexPoint apply(const SimplexPoint& y, const StochasticMatrix& q);

/// Clamp small negative round-off and renormalize; for internal integrator
/// states, not a substitute for SimplexPoint validation.
std::vector<double> project_to_simplex(std::vector<double> w);

}
