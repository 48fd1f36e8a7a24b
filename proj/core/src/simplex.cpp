#include "simplexmc/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "simplexmc/matrix.hpp"

namespace simplexmc {

namespace {

void check_dim(int k) {
  if (k < 1 || k > kMaxColors) {
    throw std::invalid_argument("SimplexPoint: dimension " + std::to_string(k) +
                                " outside [1, " + std::to_string(kMaxColors) + "]");
  }
}

}

SimplexPoint::SimplexPoint(std::vector<double> weights) : w_(std::move(weights)) {
  check_dim(static_cast<int>(w_.size()));
  double sum = 0.0;
  for (double& v : w_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SimplexPoint: non-finite entry");
    if (v < 0.0) {
      if (v < -1e-12) {
        throw std::invalid_argument("SimplexPoint: negative entry " + std::to_string(v));
      }
      v = 0.0;
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) >= 1e-9) {
    throw std::invalid_argument("SimplexPoint: weights sum to " + std::to_string(sum) +
                                ", too far from 1 to renormalize");
  }
  for (double& v : w_) v /= sum;
}

SimplexPoint SimplexPoint::uniform(int k) {
  check_dim(k);
  return SimplexPoint(std::vector<double>(k, 1.0 / k));
}

SimplexPoint SimplexPoint::delta(int k, int color) {
  check_dim(k);
  if (color < 0 || color >= k) throw std::invalid_argument("SimplexPoint::delta: color out of range");
  std::vector<double> w(k, 0.0);
  w[color] = 1.0;
  return SimplexPoint(std::move(w));
}

SimplexPoint SimplexPoint::from_counts(const std::vector<long long>& counts) {
  long long n = 0;
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("SimplexPoint::from_counts: negative count");
    n += c;
  }
  if (n <= 0) throw std::invalid_argument("SimplexPoint::from_counts: empty population");
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    w[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return SimplexPoint(std::move(w));
}

double l1_distance(const SimplexPoint& a, const SimplexPoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("l1_distance: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double tv_distance(const SimplexPoint& a, const SimplexPoint& b) {
  return 0.5 * l1_distance(a, b);
}

SimplexPoint apply(const SimplexPoint& y, const StochasticMatrix& q) {
  if (y.dim() != q.dim()) throw std::invalid_argument("apply: dimension mismatch");
  int k = y.dim();
  std::vector<double> out(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double yi = y[i];
    if (yi == 0.0) continue;
    auto row = q.row(i);
    for (int j = 0; j < k; ++j) out[j] += yi * row[j];
  }
  return SimplexPoint(std::move(out));
}

std::vector<double> project_to_simplex(std::vector<double> w) {
  double sum = 0.0;
  for (double& v : w) {
    if (!std::isfinite(v)) throw std::invalid_argument("project_to_simplex: non-finite entry");
    if (v < 0.0) {
      if (v < -1e-6) throw std::invalid_argument("project_to_simplex: entry too negative to clamp");
      v = 0.0;
    }
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("project_to_simplex: zero mass");
  for (double& v : w) v /= sum;
  return w;
}

}
