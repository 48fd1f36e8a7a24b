#include "simplexmc/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "simplexmc/rng.hpp"

namespace simplexmc {

MonotoneClock MonotoneClock::identity() { return MonotoneClock(Kind::Identity); }

MonotoneClock MonotoneClock::cantor() { return MonotoneClock(Kind::Cantor); }

MonotoneClock MonotoneClock::table(std::vector<double> ts, std::vector<double> vs) {
  if (ts.size() != vs.size() || ts.size() < 2) {
    throw std::invalid_argument("MonotoneClock::table: need matching knot lists of size >= 2");
  }
  if (ts.front() != 0.0 || ts.back() != 1.0 || vs.front() != 0.0 || vs.back() != 1.0) {
    throw std::invalid_argument("MonotoneClock::table: knots must run from (0,0) to (1,1)");
  }
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) throw std::invalid_argument("MonotoneClock::table: times must increase");
    if (vs[i] < vs[i - 1]) throw std::invalid_argument("MonotoneClock::table: values must not decrease");
  }
  MonotoneClock c(Kind::Table);
  c.ts_ = std::move(ts);
  c.vs_ = std::move(vs);
  return c;
}

double MonotoneClock::eval(double t) const {
  if (std::isnan(t)) throw std::invalid_argument("MonotoneClock::eval: nan time");
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  switch (kind_) {
    case Kind::Identity:
      return t;
    case Kind::Cantor: {
      // Ternary digits of t map to binary digits of the value; a first
      // middle-third digit pins the value to the plateau level.
      double value = 0.0, scale = 1.0;
      for (int it = 0; it < 64 && t > 0.0; ++it) {
        t *= 3.0;
        scale *= 0.5;
        if (t < 1.0) continue;
        if (t < 2.0) return value + scale;
        value += scale;
        t -= 2.0;
      }
      return value;
    }
    case Kind::Table: {
      auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
      std::size_t i = static_cast<std::size_t>(it - ts_.begin()) - 1;
      double w = (t - ts_[i]) / (ts_[i + 1] - ts_[i]);
      return vs_[i] + w * (vs_[i + 1] - vs_[i]);
    }
  }
  return 0.0;
}

double MonotoneClock::inverse(double u) const {
  if (std::isnan(u)) throw std::invalid_argument("MonotoneClock::inverse: nan level");
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (eval(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

namespace {

void check_population(int n, double horizon) {
  if (n < 1) throw std::invalid_argument("fixture: need at least one site");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("fixture: horizon must be positive and finite");
  }
}

std::vector<double> poisson_times(double horizon, std::uint64_t seed) {
  // The pair fixtures are vacuous without a jump, so condition the clock on
  // being nonempty: redraw from salted streams until a point lands. Each
  // attempt is a fixed function of (seed, attempt), keeping runs replayable.
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng clock = Rng::stream(seed, streams::kJumpTimes, attempt);
    std::vector<double> taus;
    double t = 0.0;
    while (true) {
      double next = t + clock.exponential(1.0);
      if (next <= t) next = std::nextafter(t, std::numeric_limits<double>::infinity());
      if (next > horizon) break;
      taus.push_back(next);
      t = next;
    }
    if (!taus.empty()) return taus;
  }
}

}

EnsemblePath singular_clock_process(const MonotoneClock& clock, int n, std::uint64_t seed) {
  check_population(n, 1.0);
  std::vector<int> x0(n, 0);
  std::vector<FlipEvent> events;
  events.reserve(n);
  for (int c = 0; c < n; ++c) {
    Rng rng = Rng::stream(seed, streams::kCoordinate, static_cast<std::uint64_t>(c));
    double tau = clock.inverse(rng.uniform_pos());
    events.push_back(FlipEvent{tau, c, 0, 1});
  }
  std::sort(events.begin(), events.end(), [](const FlipEvent& a, const FlipEvent& b) {
    return a.t < b.t || (a.t == b.t && a.site < b.site);
  });
  return EnsemblePath(2, n, 1.0, std::move(x0), std::move(events), seed);
}

EnsemblePath threshold_process(double y0, int n, std::uint64_t seed, double horizon) {
  if (!(y0 >= 0.0 && y0 <= 1.0)) {
    throw std::invalid_argument("threshold_process: y0 must lie in [0,1]");
  }
  check_population(n, horizon);
  int target = y0 >= 0.5 ? 1 : 0;
  std::vector<int> x0(n);
  std::vector<FlipEvent> events;
  for (int c = 0; c < n; ++c) {
    Rng rng = Rng::stream(seed, streams::kCoordinate, static_cast<std::uint64_t>(c));
    int color = rng.bernoulli(y0) ? 1 : 0;
    x0[c] = color;
    if (color == target) continue;
    double tau = rng.exponential(1.0);
    if (tau <= horizon) events.push_back(FlipEvent{tau, c, color, target});
  }
  std::sort(events.begin(), events.end(), [](const FlipEvent& a, const FlipEvent& b) {
    return a.t < b.t || (a.t == b.t && a.site < b.site);
  });
  return EnsemblePath(2, n, horizon, std::move(x0), std::move(events), seed);
}

std::pair<EnsemblePath, EnsemblePath> poisson_recolor_pair(int n, double horizon,
                                                           std::uint64_t seed) {
  check_population(n, horizon);
  std::vector<double> taus = poisson_times(horizon, seed);

  std::vector<int> x0(n);
  long long ones = 0;
  for (int c = 0; c < n; ++c) {
    x0[c] = Rng::stream(seed, streams::kInit, static_cast<std::uint64_t>(c)).bernoulli(2.0 / 3.0)
                ? 1
                : 0;
    ones += x0[c];
  }

  std::vector<int> xa = x0, xb = x0;
  long long ones_a = ones, ones_b = ones;
  std::vector<FlipEvent> ea, eb;
  for (std::size_t j = 0; j < taus.size(); ++j) {
    double tau = taus[j];

    // First process: only the currently dominant color is shaken, each of
    // its sites tossing a fair coin. The minority color's row of the jump
    // matrix is the identity row.
    Rng ra = Rng::stream(seed, streams::kSiteDrawA, j);
    int majority = 2 * ones_a >= n ? 1 : 0;
    for (int c = 0; c < n; ++c) {
      if (xa[c] != majority) continue;
      int next = ra.bernoulli(0.5) ? 1 : 0;
      if (next != xa[c]) {
        ea.push_back(FlipEvent{tau, c, xa[c], next});
        ones_a += next - xa[c];
        xa[c] = next;
      }
    }

    // Second process: every site resamples, drawing color 1 with
    // probability 1 - Y^1_{t-}; both rows of its jump matrix coincide.
    Rng rb = Rng::stream(seed, streams::kSiteDrawB, j);
    double p1 = 1.0 - static_cast<double>(ones_b) / n;
    for (int c = 0; c < n; ++c) {
      int next = rb.bernoulli(p1) ? 1 : 0;
      if (next != xb[c]) {
        eb.push_back(FlipEvent{tau, c, xb[c], next});
        ones_b += next - xb[c];
        xb[c] = next;
      }
    }
  }
  EnsemblePath first(2, n, horizon, x0, std::move(ea), seed);
  EnsemblePath second(2, n, horizon, std::move(x0), std::move(eb), seed);
  return {std::move(first), std::move(second)};
}

std::pair<EnsemblePath, EnsemblePath> feller_degenerate_pair(double p, int n, double horizon,
                                                             std::uint64_t seed) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument("feller_degenerate_pair: need 0 < p < 1/2");
  }
  check_population(n, horizon);

  std::vector<int> x0(n);
  for (int c = 0; c < n; ++c) {
    x0[c] =
        Rng::stream(seed, streams::kInit, static_cast<std::uint64_t>(c)).bernoulli(1.0 - p) ? 1 : 0;
  }
  EnsemblePath still(2, n, horizon, x0, {}, seed);

  // The moving twin recolors by [[0, 1], [p/(1-p), (1-2p)/(1-p)]], which
  // holds (p, 1-p) fixed while turning over mass 2p per jump.
  double stay1 = (1.0 - 2.0 * p) / (1.0 - p);
  std::vector<double> taus = poisson_times(horizon, seed);
  std::vector<int> x = x0;
  std::vector<FlipEvent> events;
  for (std::size_t j = 0; j < taus.size(); ++j) {
    Rng rng = Rng::stream(seed, streams::kSiteDrawA, j);
    for (int c = 0; c < n; ++c) {
      int next = x[c] == 0 ? 1 : rng.bernoulli(stay1) ? 1 : 0;
      if (next != x[c]) {
        events.push_back(FlipEvent{taus[j], c, x[c], next});
        x[c] = next;
      }
    }
  }
  EnsemblePath moving(2, n, horizon, std::move(x0), std::move(events), seed);
  return {std::move(still), std::move(moving)};
}

std::vector<PathFixture> fixture_path_corpus() {
  std::vector<PathFixture> out;
  using Sample = SimplexPath::Sample;

  out.push_back({"constant", SimplexPath::constant(SimplexPoint({0.4, 0.6}), 1.0),
                 {0.0, 0.5, 1.0}});

  out.push_back({"linear_ramp",
                 SimplexPath::from_samples({Sample{0.0, SimplexPoint({0.8, 0.2})},
                                            Sample{1.0, SimplexPoint({0.2, 0.8})}},
                                           SimplexPath::Interp::Linear),
                 {0.0, 0.5, 1.0}});

  {
    std::vector<Sample> samples;
    for (int i = 0; i <= 64; ++i) {
      double t = i / 64.0;
      double a = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * t);
      samples.push_back(Sample{t, SimplexPoint({1.0 - a, a})});
    }
    out.push_back({"sine", SimplexPath::from_samples(std::move(samples), SimplexPath::Interp::Linear),
                   {0.0, 0.25, 0.5, 0.75, 1.0}});
  }

  {
    // Polyline through the staircase; monotone, so its variation is exactly
    // the endpoint gap no matter how the plateaus are sampled.
    MonotoneClock clock = MonotoneClock::cantor();
    std::vector<Sample> samples;
    for (int i = 0; i <= 243; ++i) {
      double t = i / 243.0;
      double v = clock.eval(t);
      samples.push_back(Sample{t, SimplexPoint({1.0 - v, v})});
    }
    out.push_back({"cantor",
                   SimplexPath::from_samples(std::move(samples), SimplexPath::Interp::Linear),
                   {0.0, 0.25, 0.5, 0.75, 1.0}});
  }

  out.push_back({"single_jump",
                 SimplexPath::Builder(SimplexPoint({1.0, 0.0}))
                     .hold_until(0.5)
                     .jump_to(SimplexPoint({0.0, 1.0}))
                     .finish(1.0),
                 {0.0, 0.5, 1.0}});

  {
    SimplexPoint lo({1.0 / 3.0, 2.0 / 3.0}), hi({2.0 / 3.0, 1.0 / 3.0});
    out.push_back({"alternating_jumps",
                   SimplexPath::Builder(lo)
                       .hold_until(0.25)
                       .jump_to(hi)
                       .hold_until(0.5)
                       .jump_to(lo)
                       .hold_until(0.75)
                       .jump_to(hi)
                       .finish(1.0),
                   {0.0, 0.25, 0.5, 0.75, 1.0}});
  }

  out.push_back({"mixed_three_colors",
                 SimplexPath::Builder(SimplexPoint({0.5, 0.3, 0.2}))
                     .hold_until(0.2)
                     .linear_to(SimplexPoint({0.2, 0.5, 0.3}), 0.5)
                     .jump_to(SimplexPoint({0.6, 0.2, 0.2}))
                     .hold_until(0.8)
                     .linear_to(SimplexPoint({0.3, 0.3, 0.4}), 1.0)
                     .finish(1.0),
                 {0.0, 0.2, 0.5, 0.8, 1.0}});

  return out;
}

}
