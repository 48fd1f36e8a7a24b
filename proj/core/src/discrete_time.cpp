#include "simplexmc/discrete_time.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simplexmc/parallel.hpp"
#include "simplexmc/projection.hpp"

namespace simplexmc {

MatrixLawSampler::MatrixLawSampler(int k, DrawFn fn, std::string description)
    : k_(k), fn_(std::move(fn)), desc_(std::move(description)) {
  if (k_ < 1 || k_ > kMaxColors) throw std::invalid_argument("MatrixLawSampler: bad color count");
  if (!fn_) throw std::invalid_argument("MatrixLawSampler: empty draw function");
}

StochasticMatrix MatrixLawSampler::draw(const SimplexPoint& y, Rng& rng) const {
  StochasticMatrix q = fn_(y, rng);
  if (q.dim() != k_) {
    throw std::runtime_error("MatrixLawSampler: law drew a " + std::to_string(q.dim()) +
                             "-color matrix, expected " + std::to_string(k_));
  }
  return q;
}

MatrixLawSampler MatrixLawSampler::identity(int k) {
  return {k, [k](const SimplexPoint&, Rng&) { return StochasticMatrix::identity(k); },
          "identity (frozen chain)"};
}

MatrixLawSampler MatrixLawSampler::fixed(StochasticMatrix q) {
  int k = q.dim();
  return {k, [q = std::move(q)](const SimplexPoint&, Rng&) { return q; }, "fixed matrix"};
}

MatrixLawSampler MatrixLawSampler::mixture(std::vector<StochasticMatrix> choices,
                                           std::vector<double> weights) {
  if (choices.empty()) throw std::invalid_argument("MatrixLawSampler::mixture: no choices");
  if (choices.size() != weights.size()) {
    throw std::invalid_argument("MatrixLawSampler::mixture: weight count mismatch");
  }
  int k = choices.front().dim();
  for (const auto& q : choices) {
    if (q.dim() != k) throw std::invalid_argument("MatrixLawSampler::mixture: mixed dimensions");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("MatrixLawSampler::mixture: bad weight");
    }
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("MatrixLawSampler::mixture: weights sum to zero");
  for (double& w : weights) w /= total;

  std::string desc = "mixture of " + std::to_string(choices.size()) + " matrices";
  return {k,
          [choices = std::move(choices), weights = std::move(weights)](const SimplexPoint&,
                                                                       Rng& rng) {
            int pick = rng.categorical(weights.data(), static_cast<int>(weights.size()));
            return choices[static_cast<std::size_t>(pick)];
          },
          std::move(desc)};
}

std::pair<DiscreteTrace, EnsemblePath> simulate_discrete(const MatrixLawSampler& law,
                                                         const SimplexPoint& y0, int n, int steps,
                                                         std::uint64_t seed, bool record_colors) {
  int k = law.dim();
  if (y0.dim() != k) throw std::invalid_argument("simulate_discrete: y0 dimension mismatch");
  if (n < 1) throw std::invalid_argument("simulate_discrete: need at least one site");
  if (steps < 1) throw std::invalid_argument("simulate_discrete: need at least one step");

  std::vector<Rng> rngs;
  rngs.reserve(n);
  for (int c = 0; c < n; ++c) {
    rngs.push_back(Rng::stream(seed, streams::kCoordinate, static_cast<std::uint64_t>(c)));
  }

  std::vector<int> colors(n);
  for (int c = 0; c < n; ++c) colors[c] = rngs[c].categorical(y0.weights().data(), k);
  std::vector<int> initial = colors;

  auto empirical = [&] {
    std::vector<long long> counts(k, 0);
    for (int c : colors) ++counts[c];
    return SimplexPoint::from_counts(counts);
  };

  DiscreteTrace trace{k, y0, {}, {}, {}};
  trace.marginals.push_back(empirical());
  if (record_colors) trace.colors.push_back(colors);

  std::vector<std::vector<FlipEvent>> per_site(n);
  for (int m = 0; m < steps; ++m) {
    Rng draw_rng = Rng::stream(seed, streams::kMatrixDraw, static_cast<std::uint64_t>(m));
    StochasticMatrix q = [&] {
      try {
        return law.draw(trace.marginals.back(), draw_rng);
      } catch (const std::exception& err) {
        throw std::runtime_error("simulate_discrete: step " + std::to_string(m + 1) +
                                 " draw failed: " + err.what());
      }
    }();

    double t = m + 1.0;
    parallel_for(n, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t c = begin; c < end; ++c) {
        int cur = colors[c];
        int next = rngs[c].categorical(q.row(cur).data(), k);
        if (next != cur) {
          per_site[c].push_back(FlipEvent{t, static_cast<int>(c), cur, next});
          colors[c] = next;
        }
      }
    });

    trace.drawn.push_back(std::move(q));
    trace.marginals.push_back(empirical());
    if (record_colors) trace.colors.push_back(colors);
  }

  std::vector<FlipEvent> events;
  std::size_t total = 0;
  for (const auto& v : per_site) total += v.size();
  events.reserve(total);
  for (const auto& v : per_site) events.insert(events.end(), v.begin(), v.end());
  std::sort(events.begin(), events.end(), [](const FlipEvent& a, const FlipEvent& b) {
    return a.t < b.t || (a.t == b.t && a.site < b.site);
  });

  EnsemblePath path(k, n, static_cast<double>(steps), std::move(initial), std::move(events), seed);
  return {std::move(trace), std::move(path)};
}

DiscreteCheckReport verify_discrete(const DiscreteTrace& trace, const EnsemblePath& e) {
  int k = trace.k;
  if (e.k() != k) throw std::invalid_argument("verify_discrete: dimension mismatch");
  int steps = static_cast<int>(trace.drawn.size());
  if (static_cast<int>(trace.marginals.size()) != steps + 1) {
    throw std::invalid_argument("verify_discrete: trace has inconsistent lengths");
  }

  DiscreteCheckReport rep;
  for (int m = 0; m <= steps; ++m) {
    std::vector<long long> counts = e.counts_at(static_cast<double>(m));
    SimplexPoint replayed = SimplexPoint::from_counts(counts);
    for (int j = 0; j < k; ++j) {
      rep.marginal_dev = std::max(rep.marginal_dev, std::abs(replayed[j] - trace.marginals[m][j]));
    }
    if (m == 0) continue;

    // The one-step recursion, stated on raw counts: the sites of color j now
    // are exactly the sites routed into j by this step's pair counts.
    std::vector<long long> pairs = pair_counts(e, m - 1.0, static_cast<double>(m));
    for (int j = 0; j < k; ++j) {
      long long routed = 0;
      for (int i = 0; i < k; ++i) routed += pairs[static_cast<std::size_t>(i) * k + j];
      rep.recursion_dev =
          std::max(rep.recursion_dev, static_cast<double>(std::abs(routed - counts[j])));
    }

    std::vector<long long> before = e.counts_at(m - 1.0);
    StochasticMatrix qhat = estimate_transition(e, m - 1.0, static_cast<double>(m));
    const StochasticMatrix& drawn = trace.drawn[static_cast<std::size_t>(m - 1)];
    for (int i = 0; i < k; ++i) {
      if (before[i] == 0) {
        for (int j = 0; j < k; ++j) {
          double want = i == j ? 1.0 : 0.0;
          if (qhat(i, j) != want) rep.delta_rows_ok = false;
        }
        continue;
      }
      double row_gap = 0.0;
      for (int j = 0; j < k; ++j) row_gap = std::max(row_gap, std::abs(qhat(i, j) - drawn(i, j)));
      rep.qhat_dev = std::max(rep.qhat_dev, row_gap * std::sqrt(static_cast<double>(before[i])));
    }
  }
  return rep;
}

}
