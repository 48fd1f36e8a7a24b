#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simplexmc/ensemble.hpp"
#include "simplexmc/path.hpp"
#include "simplexmc/simplex.hpp"

namespace simplexmc {

/// A continuous nondecreasing time change of [0,1] with eval(0) = 0 and
/// eval(1) = 1. The cantor() clock is the standard staircase: continuous,
/// flat almost everywhere, yet climbing from 0 to 1, so mass driven by it
/// moves without ever having a density in time.
class MonotoneClock {
public:
  static MonotoneClock identity();
  static MonotoneClock cantor();
  /// Piecewise-linear clock through (ts[i], vs[i]); ts strictly increasing
  /// from 0 to 1, vs nondecreasing from 0 to 1.
  static MonotoneClock table(std::vector<double> ts, std::vector<double> vs);

  double eval(double t) const;
  /// Smallest t with eval(t) >= u, located by bisection to 1e-12.
  double inverse(double u) const;

private:
  enum class Kind { Identity, Cantor, Table };
  explicit MonotoneClock(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::vector<double> ts_, vs_;
};

/// n two-color sites, all starting at color 0; site c flips to 1 at the
/// clock's inverse of its own uniform draw, so the limiting frequency of
/// color 1 at time t is exactly eval(t). With the cantor() clock every flip
/// lands inside the staircase's growth set. Horizon 1.
EnsemblePath singular_clock_process(const MonotoneClock& clock, int n, std::uint64_t seed);

/// Two colors; sites start i.i.d. with color-1 probability y0, and each site
/// whose color disagrees with the side y0 starts on (1 when y0 >= 1/2, else
/// 0) flips there after an independent Exp(1) wait. The mean frequency of
/// color 1 is y0 e^{-t} + 1{y0 >= 1/2} (1 - e^{-t}), which as a map of y0 is
/// discontinuous across 1/2 for every t > 0.
EnsemblePath threshold_process(double y0, int n, std::uint64_t seed, double horizon = 2.0);

/// Two processes on two colors with the same initial colors (i.i.d. ones
/// with probability 2/3), the same Poisson(1) recoloring times, and the same
/// limiting marginal path, but genuinely different transports at every jump:
/// the first resamples only the current majority color with fair coins, the
/// second resamples every site to color 1 with probability 1 - Y^1_{t-}. The
/// row of the color the first process leaves untouched differs between the
/// two jump matrices by 1/3.
std::pair<EnsemblePath, EnsemblePath> poisson_recolor_pair(int n, double horizon,
                                                           std::uint64_t seed);

/// Two processes sharing the constant marginal (p, 1-p), 0 < p < 1/2: the
/// first never moves at all, the second recolors every site at Poisson(1)
/// times by the stationary matrix [[0, 1], [p/(1-p), (1-2p)/(1-p)]], moving
/// mass 2p per jump. Identical marginals, maximally different semigroups.
std::pair<EnsemblePath, EnsemblePath> feller_degenerate_pair(double p, int n, double horizon,
                                                             std::uint64_t seed);

/// A named deterministic path plus a natural grid for building and checking
/// its semigroup table.
struct PathFixture {
  std::string name;
  SimplexPath path;
  std::vector<double> grid;
};

/// The standing corpus used across tests and the command-line demos: a
/// constant path, a single linear ramp, a polyline sine, the Cantor
/// staircase, one total jump, alternating partial jumps, and a three-color
/// mix of holds, ramps, and a jump.
std::vector<PathFixture> fixture_path_corpus();

}
