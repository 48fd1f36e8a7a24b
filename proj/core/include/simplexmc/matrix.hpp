#pragma once

#include <span>
#include <vector>

namespace simplexmc {

/// Row-stochastic k x k matrix, row-major storage. Rows whose sums deviate
/// from 1 by less than 1e-9 are renormalized on construction; entries below
/// -1e-12 are rejected, tinier negatives are clamped to 0.
class StochasticMatrix {
public:
  StochasticMatrix(int k, std::vector<double> row_major);

  static StochasticMatrix identity(int k);
  static StochasticMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const { return k_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * k_ + j]; }
  const std::vector<double>& data() const { return a_; }
  std::span<const double> row(int i) const {
    return {a_.data() + static_cast<std::size_t>(i) * k_, static_cast<std::size_t>(k_)};
  }

  friend StochasticMatrix operator*(const StochasticMatrix& a, const StochasticMatrix& b);

  /// max_ij |this - other|, for residual checks.
  double max_abs_diff(const StochasticMatrix& other) const;

private:
  int k_;
  std::vector<double> a_;
};

/// Conservative rate matrix: nonnegative off-diagonals, zero row sums.
/// Row sums within 1e-9 of 0 are rebalanced onto the diagonal.
class GeneratorMatrix {
public:
  GeneratorMatrix(int k, std::vector<double> row_major);

  static GeneratorMatrix zero(int k);

  int dim() const { return k_; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * k_ + j]; }
  const std::vector<double>& data() const { return a_; }

private:
  int k_;
  std::vector<double> a_;
};

/// exp(dt * R) for a conservative generator, via uniformization: write
/// R = lambda (P - I) with P substochastic, scale dt until lambda*dt <= 1,
/// sum the Poisson-weighted Taylor series (all terms nonnegative, so no
/// cancellation), then square back up. Relative error <= 1e-10; the result
/// is clamped/renormalized to be exactly row-stochastic to 1e-12.
StochasticMatrix matrix_exp(const GeneratorMatrix& r, double dt);

}
