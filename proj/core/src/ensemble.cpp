#include "simplexmc/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "simplexmc/simplex.hpp"

namespace simplexmc {

EnsemblePath::EnsemblePath(int k, int n, double horizon, std::vector<int> initial_colors,
                           std::vector<FlipEvent> events, std::uint64_t seed)
    : k_(k), n_(n), horizon_(horizon), seed_(seed), initial_(std::move(initial_colors)),
      events_(std::move(events)) {
  if (k_ < 1 || k_ > kMaxColors) throw std::invalid_argument("EnsemblePath: bad color count");
  if (n_ < 1) throw std::invalid_argument("EnsemblePath: need at least one site");
  if (!std::isfinite(horizon_) || horizon_ < 0.0) {
    throw std::invalid_argument("EnsemblePath: horizon must be finite and nonnegative");
  }
  if (static_cast<int>(initial_.size()) != n_) {
    throw std::invalid_argument("EnsemblePath: initial color vector has wrong length");
  }
  for (int c : initial_) {
    if (c < 0 || c >= k_) throw std::invalid_argument("EnsemblePath: initial color out of range");
  }
  // Replay: ordering, range, and from-color consistency in one pass.
  std::vector<int> colors = initial_;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const FlipEvent& e = events_[i];
    if (!std::isfinite(e.t) || e.t <= 0.0 || e.t > horizon_) {
      throw std::invalid_argument("EnsemblePath: event " + std::to_string(i) +
                                  " outside (0, horizon]");
    }
    if (i > 0) {
      const FlipEvent& prev = events_[i - 1];
      if (e.t < prev.t || (e.t == prev.t && e.site <= prev.site)) {
        throw std::invalid_argument("EnsemblePath: events not strictly ordered by (t, site) at " +
                                    std::to_string(i));
      }
    }
    if (e.site < 0 || e.site >= n_) {
      throw std::invalid_argument("EnsemblePath: event " + std::to_string(i) + " has bad site");
    }
    if (e.from < 0 || e.from >= k_ || e.to < 0 || e.to >= k_ || e.from == e.to) {
      throw std::invalid_argument("EnsemblePath: event " + std::to_string(i) + " has bad colors");
    }
    if (colors[e.site] != e.from) {
      throw std::invalid_argument("EnsemblePath: event " + std::to_string(i) +
                                  " departs color " + std::to_string(e.from) + " but site " +
                                  std::to_string(e.site) + " holds " +
                                  std::to_string(colors[e.site]));
    }
    colors[e.site] = e.to;
  }
}

std::vector<int> EnsemblePath::colors_at(double t) const {
  std::vector<int> colors = initial_;
  for (const FlipEvent& e : events_) {
    if (e.t > t) break;
    colors[e.site] = e.to;
  }
  return colors;
}

std::vector<int> EnsemblePath::colors_before(double t) const {
  std::vector<int> colors = initial_;
  for (const FlipEvent& e : events_) {
    if (e.t >= t) break;
    colors[e.site] = e.to;
  }
  return colors;
}

std::vector<long long> EnsemblePath::counts_at(double t) const {
  std::vector<long long> counts(k_, 0);
  for (int c : colors_at(t)) ++counts[c];
  return counts;
}

std::vector<long long> EnsemblePath::counts_before(double t) const {
  std::vector<long long> counts(k_, 0);
  for (int c : colors_before(t)) ++counts[c];
  return counts;
}

}
