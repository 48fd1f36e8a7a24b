#pragma once

#include <cstdint>
#include <vector>

namespace simplexmc {

/// One site changing color at time t. `from` is the site's color immediately
/// before t; events are ordered strictly by (t, site), so simultaneous flips
/// of different sites are legal (that is what a type-II discontinuity is).
struct FlipEvent {
  double t;
  int site;
  int from;
  int to;
};

/// A finite n-site color trajectory on [0, horizon]: initial colors plus the
/// full flip history. Construction replays the events and rejects any event
/// whose `from` color disagrees with the state it claims to leave.
class EnsemblePath {
public:
  EnsemblePath(int k, int n, double horizon, std::vector<int> initial_colors,
               std::vector<FlipEvent> events, std::uint64_t seed);

  int k() const { return k_; }
  int n() const { return n_; }
  double horizon() const { return horizon_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& initial_colors() const { return initial_; }
  const std::vector<FlipEvent>& events() const { return events_; }

  /// Colors at time t (right-continuous: events at exactly t are applied).
  std::vector<int> colors_at(double t) const;
  /// Colors just before t (events at exactly t are not applied).
  std::vector<int> colors_before(double t) const;

  std::vector<long long> counts_at(double t) const;
  std::vector<long long> counts_before(double t) const;

private:
  int k_;
  int n_;
  double horizon_;
  std::uint64_t seed_;
  std::vector<int> initial_;
  std::vector<FlipEvent> events_;
};

}
