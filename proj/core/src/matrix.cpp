#include "simplexmc/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "simplexmc/simplex.hpp"

namespace simplexmc {

namespace {

void check_dim(int k, std::size_t len, const char* what) {
  if (k < 1 || k > kMaxColors) {
    throw std::invalid_argument(std::string(what) + ": dimension out of range");
  }
  if (len != static_cast<std::size_t>(k) * k) {
    throw std::invalid_argument(std::string(what) + ": storage is not k*k");
  }
}

}

StochasticMatrix::StochasticMatrix(int k, std::vector<double> row_major)
    : k_(k), a_(std::move(row_major)) {
  check_dim(k_, a_.size(), "StochasticMatrix");
  for (int i = 0; i < k_; ++i) {
    double sum = 0.0;
    for (int j = 0; j < k_; ++j) {
      double& v = a_[static_cast<std::size_t>(i) * k_ + j];
      if (!std::isfinite(v)) throw std::invalid_argument("StochasticMatrix: non-finite entry");
      if (v < 0.0) {
        if (v < -1e-12) {
          throw std::invalid_argument("StochasticMatrix: negative entry at row " +
                                      std::to_string(i));
        }
        v = 0.0;
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) >= 1e-9) {
      throw std::invalid_argument("StochasticMatrix: row " + std::to_string(i) + " sums to " +
                                  std::to_string(sum));
    }
    for (int j = 0; j < k_; ++j) a_[static_cast<std::size_t>(i) * k_ + j] /= sum;
  }
}

StochasticMatrix StochasticMatrix::identity(int k) {
  std::vector<double> a(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) a[static_cast<std::size_t>(i) * k + i] = 1.0;
  return {k, std::move(a)};
}

StochasticMatrix StochasticMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  int k = static_cast<int>(rows.size());
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(k) * k);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != k) {
      throw std::invalid_argument("StochasticMatrix::from_rows: ragged rows");
    }
    a.insert(a.end(), r.begin(), r.end());
  }
  return {k, std::move(a)};
}

StochasticMatrix operator*(const StochasticMatrix& a, const StochasticMatrix& b) {
  if (a.k_ != b.k_) throw std::invalid_argument("StochasticMatrix product: dimension mismatch");
  int k = a.k_;
  std::vector<double> out(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < k; ++l) {
      double ail = a.a_[static_cast<std::size_t>(i) * k + l];
      if (ail == 0.0) continue;
      const double* brow = b.a_.data() + static_cast<std::size_t>(l) * k;
      double* orow = out.data() + static_cast<std::size_t>(i) * k;
      for (int j = 0; j < k; ++j) orow[j] += ail * brow[j];
    }
  }
  return {k, std::move(out)};
}

double StochasticMatrix::max_abs_diff(const StochasticMatrix& other) const {
  if (k_ != other.k_) throw std::invalid_argument("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a_.size(); ++i) m = std::max(m, std::abs(a_[i] - other.a_[i]));
  return m;
}

GeneratorMatrix::GeneratorMatrix(int k, std::vector<double> row_major)
    : k_(k), a_(std::move(row_major)) {
  check_dim(k_, a_.size(), "GeneratorMatrix");
  for (int i = 0; i < k_; ++i) {
    double off = 0.0;
    for (int j = 0; j < k_; ++j) {
      double& v = a_[static_cast<std::size_t>(i) * k_ + j];
      if (!std::isfinite(v)) throw std::invalid_argument("GeneratorMatrix: non-finite entry");
      if (i == j) continue;
      if (v < 0.0) {
        if (v < -1e-12) {
          throw std::invalid_argument("GeneratorMatrix: negative off-diagonal at row " +
                                      std::to_string(i));
        }
        v = 0.0;
      }
      off += v;
    }
    double& diag = a_[static_cast<std::size_t>(i) * k_ + i];
    if (std::abs(diag + off) >= 1e-9) {
      throw std::invalid_argument("GeneratorMatrix: row " + std::to_string(i) +
                                  " sums to " + std::to_string(diag + off));
    }
    diag = -off; // make the row sum exactly zero
  }
}

GeneratorMatrix GeneratorMatrix::zero(int k) {
  return {k, std::vector<double>(static_cast<std::size_t>(k) * k, 0.0)};
}

StochasticMatrix matrix_exp(const GeneratorMatrix& r, double dt) {
  if (!std::isfinite(dt) || dt < 0.0) {
    throw std::invalid_argument("matrix_exp: dt must be finite and nonnegative");
  }
  int k = r.dim();
  if (dt == 0.0) return StochasticMatrix::identity(k);

  double lambda = 0.0;
  for (int i = 0; i < k; ++i) lambda = std::max(lambda, -r(i, i));
  if (lambda == 0.0) return StochasticMatrix::identity(k);

  // Halve dt until lambda*dt <= 1, exponentiate there, square back.
  int squarings = 0;
  double theta = lambda * dt;
  while (theta > 1.0) {
    theta *= 0.5;
    ++squarings;
  }
  double step = dt / static_cast<double>(1ULL << squarings);

  // P = I + R/lambda is row-stochastic; sum exp(-theta) theta^m/m! P^m.
  std::vector<double> p(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double v = r(i, j) / lambda;
      if (i == j) v += 1.0;
      p[static_cast<std::size_t>(i) * k + j] = std::max(v, 0.0);
    }
  }
  StochasticMatrix pmat(k, p);

  theta = lambda * step;
  std::vector<double> acc(static_cast<std::size_t>(k) * k, 0.0);
  double coeff = std::exp(-theta);
  StochasticMatrix power = StochasticMatrix::identity(k);
  double tail = 1.0;
  for (int m = 0;; ++m) {
    if (m > 0) {
      coeff *= theta / static_cast<double>(m);
      power = power * pmat;
    }
    const auto& pd = power.data();
    for (std::size_t idx = 0; idx < acc.size(); ++idx) acc[idx] += coeff * pd[idx];
    tail -= coeff;
    if (tail < 1e-16 && m >= 1) break;
    if (m > 200) break; // theta <= 1 converges in ~20 terms; this is unreachable
  }

  StochasticMatrix q(k, std::move(acc));
  for (int s = 0; s < squarings; ++s) q = q * q;
  return q;
}

}
