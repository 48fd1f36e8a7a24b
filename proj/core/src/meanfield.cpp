#include "simplexmc/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "simplexmc/parallel.hpp"
#include "simplexmc/rng.hpp"

namespace simplexmc {

namespace {

std::string point_to_string(const SimplexPoint& y) {
  std::string s = "(";
  for (int i = 0; i < y.dim(); ++i) {
    if (i) s += ", ";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", y[i]);
    s += buf;
  }
  return s + ")";
}

// Relative slack for the envelope check: fields like the spin flip attain
// their sup exactly at the simplex corners, and renormalized inputs can sit
// an ulp past them.
constexpr double kEnvelopeSlack = 1e-9;

}

RateField::RateField(int k, RateFn fn, double lipschitz_bound,
                     std::vector<double> sup_bounds_row_major)
    : k_(k), fn_(std::move(fn)), lipschitz_(lipschitz_bound), sup_(std::move(sup_bounds_row_major)) {
  if (k_ < 1 || k_ > kMaxColors) throw std::invalid_argument("RateField: bad color count");
  if (!fn_) throw std::invalid_argument("RateField: missing rate function");
  if (sup_.size() != static_cast<std::size_t>(k_) * k_) {
    throw std::invalid_argument("RateField: sup bound table is not k*k");
  }
  if (!std::isfinite(lipschitz_) || lipschitz_ < 0.0) {
    throw std::invalid_argument("RateField: bad Lipschitz bound");
  }
  total_sup_ = 0.0;
  for (int i = 0; i < k_; ++i) {
    sup_[static_cast<std::size_t>(i) * k_ + i] = 0.0;
    for (int j = 0; j < k_; ++j) {
      double b = sup_[static_cast<std::size_t>(i) * k_ + j];
      if (!std::isfinite(b) || b < 0.0) throw std::invalid_argument("RateField: bad sup bound");
      if (i != j) total_sup_ += b;
    }
  }
}

RateField RateField::constant(int k, std::vector<double> rates_row_major) {
  if (rates_row_major.size() != static_cast<std::size_t>(k) * k) {
    throw std::invalid_argument("RateField::constant: rate table is not k*k");
  }
  for (int i = 0; i < k; ++i) rates_row_major[static_cast<std::size_t>(i) * k + i] = 0.0;
  auto rates = rates_row_major;
  auto fn = [k, rates](int i, int j, const SimplexPoint&) {
    return rates[static_cast<std::size_t>(i) * k + j];
  };
  return {k, std::move(fn), 0.0, std::move(rates_row_major)};
}

RateField RateField::with_estimated_bounds(int k, RateFn fn, double lipschitz_bound, int samples,
                                           double margin, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("with_estimated_bounds: need samples");
  if (margin < 1.0) throw std::invalid_argument("with_estimated_bounds: margin < 1");
  Rng rng = Rng::stream(seed, streams::kInit);
  std::vector<double> sup(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<double> w(k);
  for (int s = 0; s < samples; ++s) {
    // Dirichlet(1) via normalized exponentials covers the whole simplex.
    double tot = 0.0;
    for (int i = 0; i < k; ++i) {
      w[i] = rng.exponential(1.0);
      tot += w[i];
    }
    for (int i = 0; i < k; ++i) w[i] /= tot;
    SimplexPoint y{std::vector<double>(w)};
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        double r = fn(i, j, y);
        if (!std::isfinite(r) || r < 0.0) {
          throw std::invalid_argument("with_estimated_bounds: field returned a bad rate");
        }
        sup[static_cast<std::size_t>(i) * k + j] =
            std::max(sup[static_cast<std::size_t>(i) * k + j], r);
      }
    }
  }
  for (double& b : sup) b *= margin;
  return {k, std::move(fn), lipschitz_bound, std::move(sup)};
}

double RateField::eval(int from, int to, const SimplexPoint& y) const {
  if (from < 0 || from >= k_ || to < 0 || to >= k_ || from == to) {
    throw std::invalid_argument("RateField::eval: bad color pair");
  }
  if (y.dim() != k_) throw std::invalid_argument("RateField::eval: dimension mismatch");
  double r = fn_(from, to, y);
  double bound = sup_bound(from, to);
  if (!std::isfinite(r) || r < 0.0 || r > bound * (1.0 + kEnvelopeSlack) + 1e-300) {
    throw std::runtime_error("RateField: rate " + std::to_string(r) + " for pair (" +
                             std::to_string(from) + "->" + std::to_string(to) +
                             ") violates [0, " + std::to_string(bound) + "] at y = " +
                             point_to_string(y));
  }
  return std::min(r, bound);
}

bool RateField::is_constant() const {
  // Three fixed interior probes; a y-dependent field that is constant on all
  // of them but not elsewhere is not something this library produces.
  Rng rng = Rng::stream(0xfe11e4ULL, streams::kInit);
  std::vector<SimplexPoint> probes;
  for (int s = 0; s < 3; ++s) {
    std::vector<double> w(k_);
    double tot = 0.0;
    for (int i = 0; i < k_; ++i) {
      w[i] = 0.1 + rng.uniform();
      tot += w[i];
    }
    for (double& v : w) v /= tot;
    probes.emplace_back(std::move(w));
  }
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) {
      if (i == j) continue;
      double r0 = fn_(i, j, probes[0]);
      for (int s = 1; s < 3; ++s) {
        if (std::abs(fn_(i, j, probes[s]) - r0) > 1e-12) return false;
      }
    }
  }
  return true;
}

RateField glauber_field(const IsingParams& p) {
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) {
    throw std::invalid_argument("glauber_field: beta must be nonnegative");
  }
  if (!std::isfinite(p.h) || !std::isfinite(p.J)) {
    throw std::invalid_argument("glauber_field: non-finite parameters");
  }
  double envelope = std::exp(p.beta * (std::abs(p.h) + std::abs(p.J)));
  auto fn = [p](int i, int j, const SimplexPoint& y) {
    double m = y[1] - y[0];
    double drive = p.beta * (p.h + p.J * m);
    if (i == 0 && j == 1) return std::exp(drive);
    return std::exp(-drive);
  };
  // |d rate / d m| <= beta |J| envelope
  double lip = p.beta * std::abs(p.J) * envelope;
  return {2, std::move(fn), lip, {0.0, envelope, envelope, 0.0}};
}

RateField reed_frost_field(const ReedFrostParams& p) {
  if (!std::isfinite(p.beta) || p.beta < 0.0 || !std::isfinite(p.rho) || p.rho < 0.0) {
    throw std::invalid_argument("reed_frost_field: rates must be nonnegative");
  }
  auto fn = [p](int i, int j, const SimplexPoint& y) {
    if (i == 0 && j == 1) return p.beta * y[1]; // S -> I at beta * fraction infected
    if (i == 1 && j == 2) return p.rho;         // I -> R
    return 0.0;
  };
  std::vector<double> sup(9, 0.0);
  sup[0 * 3 + 1] = p.beta;
  sup[1 * 3 + 2] = p.rho;
  return {3, std::move(fn), p.beta, std::move(sup)};
}

// ---- finite-n thinning -----------------------------------------------------

namespace {

struct PairTable {
  // flattened (i,j) candidate pairs with positive envelope
  std::vector<int> from, to;
  std::vector<double> cum; // cumulative envelope weights
  double total = 0.0;
};

PairTable build_pair_table(const RateField& field) {
  PairTable t;
  int k = field.k();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      double b = field.sup_bound(i, j);
      if (b <= 0.0) continue;
      t.from.push_back(i);
      t.to.push_back(j);
      t.total += b;
      t.cum.push_back(t.total);
    }
  }
  return t;
}

int pick_pair(const PairTable& t, double u) {
  double target = u * t.total;
  auto it = std::upper_bound(t.cum.begin(), t.cum.end(), target);
  if (it == t.cum.end()) return static_cast<int>(t.cum.size()) - 1;
  return static_cast<int>(it - t.cum.begin());
}

}

EnsemblePath simulate_finite(const RateField& field, int n, const std::vector<int>& x0,
                             double horizon, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_finite: need at least one site");
  if (static_cast<int>(x0.size()) != n) {
    throw std::invalid_argument("simulate_finite: initial colors have wrong length");
  }
  if (!std::isfinite(horizon) || horizon < 0.0) {
    throw std::invalid_argument("simulate_finite: horizon must be finite and nonnegative");
  }
  int k = field.k();
  std::vector<long long> counts(k, 0);
  for (int c : x0) {
    if (c < 0 || c >= k) throw std::invalid_argument("simulate_finite: initial color out of range");
    ++counts[c];
  }

  PairTable pairs = build_pair_table(field);
  std::vector<int> colors = x0;
  std::vector<FlipEvent> events;
  Rng rng = Rng::stream(seed, streams::kEvents);

  // Superposed candidate clock over all sites and pairs: rate n * sum(sup).
  // Marking a candidate with a uniform site and an envelope-weighted pair is
  // the same law as one clock per (site, pair).
  double total_rate = static_cast<double>(n) * pairs.total;
  if (total_rate > 0.0) {
    double t = 0.0;
    while (true) {
      t += rng.exponential(total_rate);
      if (t > horizon) break;
      int p = pick_pair(pairs, rng.uniform());
      int site = static_cast<int>(rng.uniform() * n);
      if (site >= n) site = n - 1;
      int i = pairs.from[p], j = pairs.to[p];
      if (colors[site] != i) continue;
      // Y just before the candidate: the event, if accepted, lands after.
      SimplexPoint y = SimplexPoint::from_counts(counts);
      double rate = field.eval(i, j, y);
      double envelope = field.sup_bound(i, j);
      if (rng.uniform() * envelope < rate) {
        if (!events.empty() && events.back().t == t && events.back().site == site) {
          // Two accepted flips of one site collapsed onto one double; nudge.
          t = std::nextafter(t, horizon + 1.0);
          if (t > horizon) break;
        }
        events.push_back(FlipEvent{t, site, i, j});
        colors[site] = j;
        --counts[i];
        ++counts[j];
      }
    }
  }
  return EnsemblePath(k, n, horizon, x0, std::move(events), seed);
}

EnsemblePath simulate_finite(const RateField& field, int n, const SimplexPoint& y0,
                             double horizon, std::uint64_t seed) {
  if (y0.dim() != field.k()) throw std::invalid_argument("simulate_finite: y0 dimension mismatch");
  if (n < 1) throw std::invalid_argument("simulate_finite: need at least one site");
  Rng rng = Rng::stream(seed, streams::kInit);
  std::vector<int> x0(n);
  for (int s = 0; s < n; ++s) x0[s] = rng.categorical(y0.weights().data(), y0.dim());
  return simulate_finite(field, n, x0, horizon, seed);
}

// ---- fluid-limit ODE -------------------------------------------------------

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

// Cap on the output spacing so that reading the step table between accepted
// points stays within O(1e-3) of the true value.
constexpr double kMaxStep = 1.0 / 1024;

std::vector<double> field_derivative(const RateField& field, const std::vector<double>& yraw) {
  int k = field.k();
  SimplexPoint y{project_to_simplex(yraw)};
  std::vector<double> d(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      double f = field.eval(i, j, y);
      double flow = f * y[i];
      d[j] += flow;
      d[i] -= flow;
    }
  }
  return d;
}

}

SimplexPath solve_ode(const RateField& field, const SimplexPoint& y0, double horizon, double tol,
                      const std::vector<double>& knots) {
  if (y0.dim() != field.k()) throw std::invalid_argument("solve_ode: y0 dimension mismatch");
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw std::invalid_argument("solve_ode: horizon must be positive and finite");
  }
  if (!std::isfinite(tol) || tol <= 0.0) throw std::invalid_argument("solve_ode: bad tolerance");

  std::vector<double> stops = knots;
  for (double t : stops) {
    if (!std::isfinite(t) || t < 0.0 || t > horizon) {
      throw std::invalid_argument("solve_ode: knot outside [0, horizon]");
    }
  }
  stops.push_back(horizon);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  int k = field.k();
  std::vector<double> y = y0.weights();
  double t = 0.0;
  std::vector<SimplexPath::Sample> samples;
  samples.push_back({0.0, y0});

  double h = std::min(kMaxStep, horizon);
  std::size_t next_stop = 0;
  while (stops[next_stop] <= 0.0) ++next_stop;

  std::vector<double> k1 = field_derivative(field, y);
  while (t < horizon) {
    double target = stops[next_stop];
    h = std::min({h, kMaxStep, target - t});
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw std::runtime_error("solve_ode: step size underflow near t = " + std::to_string(t) +
                               "; the field is stiffer than the tolerance budget allows");
    }

    auto stage = [&](const std::vector<double>& base, auto&&... terms) {
      std::vector<double> out = base;
      auto add = [&](double c, const std::vector<double>& v) {
        for (int i = 0; i < k; ++i) out[i] += h * c * v[i];
      };
      (add(terms.first, terms.second), ...);
      return out;
    };

    std::vector<double> k2 = field_derivative(field, stage(y, std::pair{kA21, k1}));
    std::vector<double> k3 =
        field_derivative(field, stage(y, std::pair{kA31, k1}, std::pair{kA32, k2}));
    std::vector<double> k4 = field_derivative(
        field, stage(y, std::pair{kA41, k1}, std::pair{kA42, k2}, std::pair{kA43, k3}));
    std::vector<double> k5 =
        field_derivative(field, stage(y, std::pair{kA51, k1}, std::pair{kA52, k2},
                                      std::pair{kA53, k3}, std::pair{kA54, k4}));
    std::vector<double> k6 = field_derivative(
        field, stage(y, std::pair{kA61, k1}, std::pair{kA62, k2}, std::pair{kA63, k3},
                     std::pair{kA64, k4}, std::pair{kA65, k5}));

    std::vector<double> ynew(k);
    for (int i = 0; i < k; ++i) {
      ynew[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] + kB6 * k6[i]);
    }
    std::vector<double> k7 = field_derivative(field, ynew);

    double err = 0.0;
    for (int i = 0; i < k; ++i) {
      double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] + kE6 * k6[i] +
                      kE7 * k7[i]);
      err = std::max(err, std::abs(e));
    }

    if (err <= tol) {
      t += h;
      y = project_to_simplex(std::move(ynew));
      samples.push_back({t, SimplexPoint{std::vector<double>(y)}});
      k1 = field_derivative(field, y); // not reusing k7: y was renormalized
      if (t >= target) {
        while (next_stop < stops.size() && stops[next_stop] <= t) ++next_stop;
        if (next_stop >= stops.size()) break;
      }
    }
    double scale = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h *= std::clamp(scale, 0.2, 5.0);
  }

  return SimplexPath::from_samples(std::move(samples), SimplexPath::Interp::Step, horizon);
}

// ---- limit-process sampler -------------------------------------------------

EnsemblePath simulate_limit(const RateField& field, int n, const SimplexPoint& y0, double horizon,
                            double tol, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_limit: need at least one site");
  if (y0.dim() != field.k()) throw std::invalid_argument("simulate_limit: y0 dimension mismatch");
  SimplexPath path = solve_ode(field, y0, horizon, tol);

  PairTable pairs = build_pair_table(field);
  std::vector<int> x0(n);
  std::vector<std::vector<FlipEvent>> per_site(n);

  parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t c = begin; c < end; ++c) {
      Rng rng = Rng::stream(seed, streams::kCoordinate, static_cast<std::uint64_t>(c));
      int color = rng.categorical(y0.weights().data(), y0.dim());
      x0[c] = color;
      if (pairs.total <= 0.0) continue;
      double t = 0.0;
      while (true) {
        t += rng.exponential(pairs.total);
        if (t > horizon) break;
        int p = pick_pair(pairs, rng.uniform());
        int i = pairs.from[p], j = pairs.to[p];
        if (color != i) continue;
        double rate = field.eval(i, j, path.at(t));
        if (rng.uniform() * field.sup_bound(i, j) < rate) {
          auto& mine = per_site[c];
          if (!mine.empty() && mine.back().t == t) {
            t = std::nextafter(t, horizon + 1.0);
            if (t > horizon) break;
          }
          mine.push_back(FlipEvent{t, static_cast<int>(c), i, j});
          color = j;
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
  return EnsemblePath(field.k(), n, horizon, std::move(x0), std::move(events), seed);
}

}
