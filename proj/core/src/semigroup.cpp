#include "simplexmc/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "simplexmc/parallel.hpp"
#include "simplexmc/rng.hpp"

namespace simplexmc {

// ---- table -----------------------------------------------------------------

SemigroupTable::SemigroupTable(std::vector<double> grid, std::vector<StochasticMatrix> factors,
                               std::vector<double> transfer, TableOrigin origin,
                               std::optional<SimplexPoint> y0)
    : grid_(std::move(grid)), factors_(std::move(factors)), transfer_(std::move(transfer)),
      origin_(origin), y0_(std::move(y0)) {
  if (grid_.size() < 2) throw std::invalid_argument("SemigroupTable: need at least two grid times");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) {
      throw std::invalid_argument("SemigroupTable: grid must strictly increase");
    }
  }
  if (factors_.size() != grid_.size() - 1) {
    throw std::invalid_argument("SemigroupTable: factor count must be grid size - 1");
  }
  if (transfer_.size() != factors_.size()) {
    throw std::invalid_argument("SemigroupTable: transfer count must match factor count");
  }
  int k = factors_.front().dim();
  for (const auto& f : factors_) {
    if (f.dim() != k) throw std::invalid_argument("SemigroupTable: mixed factor dimensions");
  }
  for (double tr : transfer_) {
    if (!std::isfinite(tr) || tr < 0.0) throw std::invalid_argument("SemigroupTable: bad transfer");
  }
  if (y0_ && y0_->dim() != k) throw std::invalid_argument("SemigroupTable: y0 dimension mismatch");
}

StochasticMatrix SemigroupTable::between(int i, int j) const {
  if (i < 0 || j > steps() || i > j) throw std::invalid_argument("SemigroupTable::between: bad span");
  StochasticMatrix q = StochasticMatrix::identity(dim());
  for (int s = i; s < j; ++s) q = q * factors_[s];
  return q;
}

// ---- minimal-flux generator and transports ---------------------------------

GeneratorMatrix rate_matrix(const std::vector<double>& v, const SimplexPoint& y, double eps) {
  int k = y.dim();
  if (static_cast<int>(v.size()) != k) throw std::invalid_argument("rate_matrix: dimension mismatch");
  double sum = 0.0, pos = 0.0;
  for (double vi : v) {
    if (!std::isfinite(vi)) throw std::invalid_argument("rate_matrix: non-finite direction");
    sum += vi;
    if (vi > 0.0) pos += vi;
  }
  if (std::abs(sum) > 1e-12) {
    throw std::invalid_argument("rate_matrix: direction components sum to " + std::to_string(sum) +
                                ", expected 0");
  }
  std::vector<double> r(static_cast<std::size_t>(k) * k, 0.0);
  if (pos > 0.0) {
    for (int i = 0; i < k; ++i) {
      if (v[i] >= 0.0) continue; // only losing rows carry rates
      if (!(y[i] > eps)) {
        throw std::invalid_argument("rate_matrix: color " + std::to_string(i) +
                                    " loses mass but has frequency " + std::to_string(y[i]));
      }
      for (int j = 0; j < k; ++j) {
        if (j == i || v[j] <= 0.0) continue;
        r[static_cast<std::size_t>(i) * k + j] = (-v[i]) * v[j] / (pos * y[i]);
      }
      r[static_cast<std::size_t>(i) * k + i] = v[i] / y[i];
    }
  }
  return {k, std::move(r)};
}

StochasticMatrix jump_transport_matrix(const SimplexPoint& y, const SimplexPoint& y2) {
  int k = y.dim();
  if (y2.dim() != k) throw std::invalid_argument("jump_transport_matrix: dimension mismatch");
  double gain = 0.0;
  for (int j = 0; j < k; ++j) gain += std::max(y2[j] - y[j], 0.0);
  if (gain <= 1e-15) return StochasticMatrix::identity(k);

  std::vector<double> q(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    double* row = q.data() + static_cast<std::size_t>(i) * k;
    if (y2[i] >= y[i]) {
      row[i] = 1.0;
      continue;
    }
    if (!(y[i] > 0.0)) {
      throw std::invalid_argument("jump_transport_matrix: color " + std::to_string(i) +
                                  " loses mass but has frequency 0");
    }
    double keep = y2[i] / y[i];
    row[i] = keep;
    double spill = 1.0 - keep;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      double g = std::max(y2[j] - y[j], 0.0);
      if (g > 0.0) row[j] = spill * g / gain;
    }
  }
  return {k, std::move(q)};
}

StochasticMatrix transport_linear(const SimplexPoint& y0, const SimplexPoint& y1, double tol) {
  int k = y0.dim();
  if (y1.dim() != k) throw std::invalid_argument("transport_linear: dimension mismatch");
  double length = tv_distance(y0, y1);
  if (length <= 1e-15) return StochasticMatrix::identity(k);

  // Unit-speed direction in variation time; constant along the segment.
  std::vector<double> v(k);
  for (int i = 0; i < k; ++i) v[i] = (y1[i] - y0[i]) / length;

  auto midpoint_product = [&](int pieces) {
    StochasticMatrix q = StochasticMatrix::identity(k);
    double du = length / pieces;
    for (int p = 0; p < pieces; ++p) {
      double mid = (p + 0.5) * du / length; // in [0,1] along the segment
      std::vector<double> w(k);
      for (int i = 0; i < k; ++i) w[i] = y0[i] + mid * (y1[i] - y0[i]);
      SimplexPoint ymid{std::move(w)};
      q = q * matrix_exp(rate_matrix(v, ymid, 0.0), du);
    }
    return q;
  };

  StochasticMatrix prev = midpoint_product(1);
  for (int pieces = 2; pieces <= (1 << 16); pieces *= 2) {
    StochasticMatrix cur = midpoint_product(pieces);
    if (cur.max_abs_diff(prev) < tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("transport_linear: refinement did not stabilize");
}

// ---- construction over a grid ----------------------------------------------

namespace {

void check_grid(const std::vector<double>& grid, double horizon) {
  if (grid.size() < 2) throw std::invalid_argument("semigroup grid: need at least two times");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || grid[i] < 0.0 || grid[i] > horizon) {
      throw std::invalid_argument("semigroup grid: time outside [0, horizon]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("semigroup grid: times must strictly increase");
    }
  }
}

}

SemigroupTable build_minimal_semigroup(const SimplexPath& p, std::vector<double> grid) {
  check_grid(grid, p.horizon());
  int k = p.dim();
  double t0 = grid.front();

  std::vector<StochasticMatrix> factors;
  std::vector<double> transfer;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    StochasticMatrix q = StochasticMatrix::identity(k);
    double moved = 0.0;
    // Both piece kinds use the closed-form minimal transport. For a linear
    // piece this equals the time-ordered flux product (each coordinate is
    // monotone along a straight segment), and unlike the numerical product
    // it stays exact when a losing coordinate runs all the way to zero.
    p.visit(
        grid[g], grid[g + 1],
        [&](const SimplexPath::JumpPiece& jump) {
          q = q * jump_transport_matrix(jump.pre, jump.post);
          moved += tv_distance(jump.pre, jump.post);
        },
        [&](const SimplexPath::LinearPiece& lin) {
          q = q * jump_transport_matrix(lin.y0, lin.y1);
          moved += tv_distance(lin.y0, lin.y1);
        });
    factors.push_back(std::move(q));
    transfer.push_back(moved);
  }
  return {std::move(grid), std::move(factors), std::move(transfer),
          TableOrigin::ConstructedFromPath, p.at(t0)};
}

SemigroupCheckReport check_semigroup(const SemigroupTable& tab, const SimplexPath& p, double tol) {
  if (tab.dim() != p.dim()) throw std::invalid_argument("check_semigroup: dimension mismatch");
  const std::vector<double>& grid = tab.grid();
  if (grid.front() < 0.0 || grid.back() > p.horizon()) {
    throw std::invalid_argument("check_semigroup: table grid leaves the path's window");
  }
  int m = tab.steps();
  SemigroupCheckReport rep;
  rep.tol = tol;

  std::vector<SimplexPoint> marg;
  marg.reserve(grid.size());
  for (double t : grid) marg.push_back(p.at(t));

  auto span = [&](int i, int j) { return tab.between(i, j); };

  // Cocycle: the table's spans are products by definition, so this measures
  // only floating-point association drift; sample triples when the grid is big.
  Rng rng = Rng::stream(0xc0c1c7eULL, streams::kInit);
  auto triples = [&](auto&& fn) {
    if (m + 1 <= 12) {
      for (int r = 0; r <= m; ++r)
        for (int s = r; s <= m; ++s)
          for (int t = s; t <= m; ++t) fn(r, s, t);
    } else {
      for (int draw = 0; draw < 200; ++draw) {
        int r = static_cast<int>(rng.uniform() * (m + 1));
        int s = r + static_cast<int>(rng.uniform() * (m + 1 - r));
        int t = s + static_cast<int>(rng.uniform() * (m + 1 - s));
        fn(std::min(r, m), std::min(s, m), std::min(t, m));
      }
    }
  };
  triples([&](int r, int s, int t) {
    StochasticMatrix direct = span(r, t);
    StochasticMatrix composed = span(r, s) * span(s, t);
    rep.cocycle_residual = std::max(rep.cocycle_residual, direct.max_abs_diff(composed));
  });

  // Compatibility: Y_s Q_{s,t} must reproduce Y_t for every grid pair.
  for (int i = 0; i <= m; ++i) {
    for (int j = i; j <= m; ++j) {
      StochasticMatrix q = span(i, j);
      double resid = 0.0;
      for (int col = 0; col < tab.dim(); ++col) {
        double acc = 0.0;
        for (int row = 0; row < tab.dim(); ++row) acc += marg[i][row] * q(row, col);
        resid += std::abs(acc - marg[j][col]);
      }
      rep.compatibility_residual = std::max(rep.compatibility_residual, 0.5 * resid);
    }
  }

  // Minimality: the recorded transfers against the path's variation.
  double total_transfer = 0.0;
  for (double tr : tab.transfer()) total_transfer += tr;
  rep.minimality_gap = std::abs(total_transfer - path_total_variation(p, grid.front(), grid.back()));

  // Subadditivity of the net transfer implied by factors and marginals.
  auto net_transfer = [&](int i, int j) {
    StochasticMatrix q = span(i, j);
    double moved = 0.0;
    for (int c = 0; c < tab.dim(); ++c) moved += marg[i][c] * (1.0 - q(c, c));
    return moved;
  };
  triples([&](int r, int s, int t) {
    if (net_transfer(r, t) > net_transfer(r, s) + net_transfer(s, t) + tol) {
      rep.subadditivity_violations.push_back({r, s, t});
    }
  });
  return rep;
}

// ---- sampling a table ------------------------------------------------------

EnsemblePath sample_inhomogeneous_chain(const SemigroupTable& tab, const SimplexPoint& y0, int n,
                                        std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_inhomogeneous_chain: need at least one site");
  int k = tab.dim();
  if (y0.dim() != k) throw std::invalid_argument("sample_inhomogeneous_chain: y0 dimension mismatch");
  if (tab.grid().front() != 0.0) {
    throw std::invalid_argument("sample_inhomogeneous_chain: table grid must start at 0");
  }
  if (tab.origin() == TableOrigin::ConstructedFromPath && tab.y0() &&
      tv_distance(y0, *tab.y0()) > 1e-9) {
    throw std::invalid_argument(
        "sample_inhomogeneous_chain: y0 disagrees with the table's initial marginal");
  }

  int steps = tab.steps();
  double horizon = tab.grid().back();
  std::vector<int> x0(n);
  std::vector<std::vector<FlipEvent>> per_site(n);

  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t c = begin; c < end; ++c) {
      Rng rng = Rng::stream(seed, streams::kCoordinate, static_cast<std::uint64_t>(c));
      int color = rng.categorical(y0.weights().data(), k);
      x0[c] = color;
      for (int s = 0; s < steps; ++s) {
        auto row = tab.factors()[s].row(color);
        int next = rng.categorical(row.data(), k);
        if (next != color) {
          per_site[c].push_back(FlipEvent{tab.grid()[s + 1], static_cast<int>(c), color, next});
          color = next;
        }
      }
    }
  });

  std::vector<FlipEvent> events;
  std::size_t total = 0;
  for (const auto& v : per_site) total += v.size();
  events.reserve(total);
  for (const auto& v : per_site) events.insert(events.end(), v.begin(), v.end());
  std::sort(events.begin(), events.end(), [](const FlipEvent& a, const FlipEvent& b) {
    return a.t < b.t || (a.t == b.t && a.site < b.site);
  });
  return EnsemblePath(k, n, horizon, std::move(x0), std::move(events), seed);
}

// ---- deterministic flow check ----------------------------------------------

FellerFlowReport feller_flow_check(const RateField& field, double horizon,
                                   std::vector<double> grid) {
  if (!field.is_constant()) {
    throw std::invalid_argument("feller_flow_check: field depends on y; the flow is not deterministic");
  }
  check_grid(grid, horizon);
  int k = field.k();

  SimplexPoint probe = SimplexPoint::uniform(k);
  std::vector<double> r(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    double out = 0.0;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      double f = field.eval(i, j, probe);
      r[static_cast<std::size_t>(i) * k + j] = f;
      out += f;
    }
    r[static_cast<std::size_t>(i) * k + i] = -out;
  }
  GeneratorMatrix gen(k, std::move(r));

  FellerFlowReport rep;
  int m = static_cast<int>(grid.size());

  std::vector<StochasticMatrix> factors;
  for (int i = 0; i + 1 < m; ++i) factors.push_back(matrix_exp(gen, grid[i + 1] - grid[i]));

  auto span = [&](int i, int j) {
    StochasticMatrix q = StochasticMatrix::identity(k);
    for (int s = i; s < j; ++s) q = q * factors[s];
    return q;
  };

  // (i) cocycle: products of step factors against the directly exponentiated gap
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      StochasticMatrix direct = matrix_exp(gen, grid[j] - grid[i]);
      rep.cocycle_dev = std::max(rep.cocycle_dev, span(i, j).max_abs_diff(direct));
    }
  }

  // (ii) stationarity: factors over equal gaps must coincide
  for (int i = 0; i + 1 < m; ++i) {
    for (int j = i + 1; j + 1 < m; ++j) {
      double gi = grid[i + 1] - grid[i], gj = grid[j + 1] - grid[j];
      if (std::abs(gi - gj) <= 1e-15) {
        rep.stationarity_dev = std::max(rep.stationarity_dev, factors[i].max_abs_diff(factors[j]));
      }
    }
  }

  // (iv) small gaps: |Q_{0,gap} - I| must shrink monotonically toward 0
  StochasticMatrix eye = StochasticMatrix::identity(k);
  rep.shrink_gaps = {1e-1, 1e-2, 1e-3};
  for (double gap : rep.shrink_gaps) {
    rep.shrink_norms.push_back(matrix_exp(gen, gap).max_abs_diff(eye));
  }
  for (std::size_t i = 1; i < rep.shrink_norms.size(); ++i) {
    rep.identity_dev = std::max(rep.identity_dev, rep.shrink_norms[i] - rep.shrink_norms[i - 1]);
  }
  rep.identity_dev = std::max(rep.identity_dev, 0.0);

  // Flow versus the integrated fluid limit along the grid.
  SimplexPath ode = solve_ode(field, SimplexPoint::uniform(k), horizon, 1e-12, grid);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      SimplexPoint expected = apply(ode.at(grid[i]), matrix_exp(gen, grid[j] - grid[i]));
      rep.ode_compat_dev = std::max(rep.ode_compat_dev, tv_distance(expected, ode.at(grid[j])));
    }
  }
  return rep;
}

}
