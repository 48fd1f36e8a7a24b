#pragma once

#include <cstdint>

namespace simplexmc {

/// Counter-based splittable generator (SplitMix64 core). Streams are derived
/// from (seed, domain, index) by hashing, so every coordinate of a simulation
/// owns an independent stream and results do not depend on scheduling.
class Rng {
public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  /// Derive a named stream. Distinct (seed, domain, index) triples give
  /// statistically independent streams.
  static Rng stream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index = 0);

  std::uint64_t next();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1); never returns 0, safe for logs.
  double uniform_pos();
  /// Exponential with the given rate (rate > 0).
  double exponential(double rate);
  bool bernoulli(double p);
  /// Sample an index from k weights summing to ~1 (CDF scan).
  int categorical(const double* w, int k);

private:
  std::uint64_t state_;
};

/// Stream domains. Keeping these centralized avoids accidental stream reuse
/// between unrelated draws under the same master seed.
namespace streams {
inline constexpr std::uint64_t kInit = 1;       // initial color draws
inline constexpr std::uint64_t kCoordinate = 2; // per-coordinate event streams
inline constexpr std::uint64_t kEvents = 3;     // single-stream event generation
inline constexpr std::uint64_t kMatrixDraw = 4; // per-step matrix law draws
inline constexpr std::uint64_t kJumpTimes = 5;  // shared Poisson jump clocks
inline constexpr std::uint64_t kSiteDrawA = 6;  // per-jump site recoloring, first process
inline constexpr std::uint64_t kSiteDrawB = 7;  // per-jump site recoloring, second process
}

}
