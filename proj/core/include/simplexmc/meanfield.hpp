#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/path.hpp"
#include "simplexmc/simplex.hpp"

namespace simplexmc {

/// Per-site flip rates f_{ij}(y) that depend on the configuration only
/// through the empirical color frequencies y. Every field carries declared
/// envelopes sup_y f_{ij} used as candidate-clock rates by the thinning
/// simulators; an evaluation above its envelope (or below zero) is an error,
/// not something to clip, because it would silently bias the acceptance step.
class RateField {
public:
  using RateFn = std::function<double(int from, int to, const SimplexPoint& y)>;

  RateField(int k, RateFn fn, double lipschitz_bound, std::vector<double> sup_bounds_row_major);

  /// Field with y-independent rates (k x k row-major, diagonal ignored).
  static RateField constant(int k, std::vector<double> rates_row_major);

  /// Estimate envelopes by sampling the simplex and padding with a margin.
  /// For fields without a clean closed-form sup; the declared value is still
  /// binding during simulation.
  static RateField with_estimated_bounds(int k, RateFn fn, double lipschitz_bound,
                                         int samples = 4096, double margin = 1.1,
                                         std::uint64_t seed = 0x5eedb0a7ULL);

  int k() const { return k_; }
  double sup_bound(int from, int to) const { return sup_[static_cast<std::size_t>(from) * k_ + to]; }
  const std::vector<double>& sup_bounds() const { return sup_; }
  /// Sum of all envelopes: total candidate rate per site.
  double total_sup() const { return total_sup_; }
  double lipschitz_bound() const { return lipschitz_; }

  /// Evaluate f_{from,to}(y), enforcing 0 <= f <= sup.
  double eval(int from, int to, const SimplexPoint& y) const;

  /// True when the field ignores y (probed at a few fixed interior points).
  bool is_constant() const;

private:
  int k_;
  RateFn fn_;
  double lipschitz_;
  std::vector<double> sup_;
  double total_sup_;
};

/// Two-color spin field driven by the magnetization m = y+ - y- (color 1 is
/// +): rate(-,+) = exp(beta (h + J m)), rate(+,-) = exp(-beta (h + J m)).
struct IsingParams {
  double beta = 1.0;
  double h = 0.0;
  double J = 1.0;
};
RateField glauber_field(const IsingParams& p);

/// Three-color epidemic S=0, I=1, R=2: infection at beta * y_I, recovery at
/// rho; every other transition is forbidden.
struct ReedFrostParams {
  double beta = 1.0;
  double rho = 1.0;
};
RateField reed_frost_field(const ReedFrostParams& p);

/// Simulate n interacting sites by Poisson thinning: candidate clocks at the
/// declared envelopes, a candidate at tau flips with probability
/// f(Y_{tau-}) / envelope. Exact in law; single stream, sequential in time.
EnsemblePath simulate_finite(const RateField& field, int n, const std::vector<int>& x0,
                             double horizon, std::uint64_t seed);
/// Same, drawing the initial colors i.i.d. from y0.
EnsemblePath simulate_finite(const RateField& field, int n, const SimplexPoint& y0,
                             double horizon, std::uint64_t seed);

/// Fluid-limit frequencies: dy_j/dt = sum_{i!=j} f_{ij}(y) y_i - y_j sum_{j'!=j} f_{jj'}(y),
/// integrated by adaptive embedded RK with per-step error <= tol and each
/// accepted state renormalized onto the simplex. The returned path is the
/// step-sampled table of accepted points; `knots` forces specific times to
/// be accepted points (useful when the path will be read off a grid).
SimplexPath solve_ode(const RateField& field, const SimplexPoint& y0, double horizon,
                      double tol, const std::vector<double>& knots = {});

/// n independent coordinates thinned against the deterministic path from
/// solve_ode instead of the empirical frequencies. Coordinate c draws from
/// stream(seed, kCoordinate, c), so the result is bit-identical no matter
/// how many workers run the loop.
EnsemblePath simulate_limit(const RateField& field, int n, const SimplexPoint& y0,
                            double horizon, double tol, std::uint64_t seed);

}
