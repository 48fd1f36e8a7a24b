#include "simplexmc/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace simplexmc {

namespace {

void check_time(const EnsemblePath& e, double t, const char* what) {
  if (!std::isfinite(t) || t < 0.0 || t > e.horizon()) {
    throw std::invalid_argument(std::string(what) + ": time " + std::to_string(t) +
                                " outside [0, horizon]");
  }
}

std::vector<int> colors(const EnsemblePath& e, double t, Side side) {
  return side == Side::Right ? e.colors_at(t) : e.colors_before(t);
}

StochasticMatrix transition_from_counts(int k, const std::vector<long long>& pairs) {
  std::vector<double> q(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    long long row_total = 0;
    for (int j = 0; j < k; ++j) row_total += pairs[static_cast<std::size_t>(i) * k + j];
    if (row_total == 0) {
      q[static_cast<std::size_t>(i) * k + i] = 1.0; // delta row: no mass to condition on
      continue;
    }
    for (int j = 0; j < k; ++j) {
      q[static_cast<std::size_t>(i) * k + j] =
          static_cast<double>(pairs[static_cast<std::size_t>(i) * k + j]) /
          static_cast<double>(row_total);
    }
  }
  return {k, std::move(q)};
}

}

SimplexPoint project_at(const EnsemblePath& e, double t, Side side) {
  check_time(e, t, "project_at");
  std::vector<long long> counts(e.k(), 0);
  for (int c : colors(e, t, side)) ++counts[c];
  return SimplexPoint::from_counts(counts);
}

SimplexPath project(const EnsemblePath& e, std::vector<double> times, Side side) {
  if (times.empty()) throw std::invalid_argument("project: no times requested");
  for (double t : times) check_time(e, t, "project");
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.front() != 0.0) times.insert(times.begin(), 0.0);

  // One sweep over the events, snapshotting counts at each requested time.
  std::vector<long long> counts(e.k(), 0);
  for (int c : e.initial_colors()) ++counts[c];
  std::vector<SimplexPath::Sample> rows;
  rows.reserve(times.size());
  std::size_t next = 0;
  for (const FlipEvent& ev : e.events()) {
    while (next < times.size() &&
           (side == Side::Right ? ev.t > times[next] : ev.t >= times[next])) {
      rows.push_back({times[next], SimplexPoint::from_counts(counts)});
      ++next;
    }
    if (next >= times.size()) break;
    --counts[ev.from];
    ++counts[ev.to];
  }
  for (; next < times.size(); ++next) rows.push_back({times[next], SimplexPoint::from_counts(counts)});

  if (e.horizon() <= 0.0) {
    throw std::invalid_argument("project: ensemble spans a zero-length window");
  }
  return SimplexPath::from_samples(std::move(rows), SimplexPath::Interp::Step, e.horizon());
}

std::vector<long long> pair_counts(const EnsemblePath& e, double s, double t) {
  check_time(e, s, "pair_counts");
  check_time(e, t, "pair_counts");
  if (s > t) throw std::invalid_argument("pair_counts: s must not exceed t");
  std::vector<int> at_s = e.colors_at(s);
  std::vector<int> at_t = e.colors_at(t);
  int k = e.k();
  std::vector<long long> pairs(static_cast<std::size_t>(k) * k, 0);
  for (int site = 0; site < e.n(); ++site) {
    ++pairs[static_cast<std::size_t>(at_s[site]) * k + at_t[site]];
  }
  return pairs;
}

StochasticMatrix estimate_transition(const EnsemblePath& e, double s, double t) {
  return transition_from_counts(e.k(), pair_counts(e, s, t));
}

StochasticMatrix estimate_jump_transition(const EnsemblePath& e, double t) {
  check_time(e, t, "estimate_jump_transition");
  std::vector<int> pre = e.colors_before(t);
  std::vector<int> post = e.colors_at(t);
  int k = e.k();
  std::vector<long long> pairs(static_cast<std::size_t>(k) * k, 0);
  for (int site = 0; site < e.n(); ++site) {
    ++pairs[static_cast<std::size_t>(pre[site]) * k + post[site]];
  }
  return transition_from_counts(k, pairs);
}

double mass_transfer(const EnsemblePath& e, double s, double t) {
  std::vector<long long> pairs = pair_counts(e, s, t);
  int k = e.k();
  long long moved = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j) moved += pairs[static_cast<std::size_t>(i) * k + j];
    }
  }
  return static_cast<double>(moved) / static_cast<double>(e.n());
}

EmpiricalSemigroup empirical_semigroup(const EnsemblePath& e, std::vector<double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("empirical_semigroup: need at least two grid times");
  for (double t : grid) check_time(e, t, "empirical_semigroup");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("empirical_semigroup: grid must strictly increase");
    }
  }
  EmpiricalSemigroup out;
  out.grid = grid;
  for (double t : grid) {
    std::vector<long long> counts = e.counts_at(t);
    out.marginals.push_back(SimplexPoint::from_counts(counts));
    std::vector<char> mask(e.k());
    for (int c = 0; c < e.k(); ++c) mask[c] = counts[c] > 0 ? 1 : 0;
    out.supported.push_back(std::move(mask));
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    out.factors.push_back(estimate_transition(e, grid[i], grid[i + 1]));
  }
  return out;
}

DiscontinuityReport classify_discontinuities(const EnsemblePath& e, double theta) {
  if (!std::isfinite(theta) || theta <= 0.0 || theta > 1.0) {
    throw std::invalid_argument("classify_discontinuities: theta must lie in (0, 1]");
  }
  DiscontinuityReport report;
  report.theta = theta;
  long long threshold = static_cast<long long>(std::ceil(theta * e.n() - 1e-9));
  threshold = std::max<long long>(threshold, 2);

  const auto& events = e.events();
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i;
    while (j < events.size() && events[j].t == events[i].t) ++j;
    Discontinuity d;
    d.t = events[i].t;
    for (std::size_t l = i; l < j; ++l) d.sites.push_back(events[l].site);
    long long m = static_cast<long long>(j - i);
    if (m >= threshold) {
      d.type2 = true;
      d.jump = estimate_jump_transition(e, d.t);
      d.pre = project_at(e, d.t, Side::Left);
      d.post = project_at(e, d.t, Side::Right);
    } else {
      d.multi_warning = m > 1;
    }
    report.entries.push_back(std::move(d));
    i = j;
  }
  return report;
}

}
