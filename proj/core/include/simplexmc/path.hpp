#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "simplexmc/simplex.hpp"

namespace simplexmc {

/// Cadlag simplex-valued path on [0, horizon], stored as segments that tile
/// the interval: constant holds, linear ramps, and sampled tables evaluated
/// piecewise-constant from the right. Jumps live implicitly at segment
/// boundaries (and between table rows) wherever the value changes.
class SimplexPath {
  struct Seg;

public:
  enum class Interp { Step, Linear };

  struct Sample {
    double t;
    SimplexPoint y;
  };

  /// A discontinuity: left limit `pre`, value `post` at time t.
  struct JumpPiece {
    double t;
    SimplexPoint pre, post;
  };
  /// A continuous run between jumps; y0 == y1 means a constant hold.
  struct LinearPiece {
    double t0, t1;
    SimplexPoint y0, y1;
  };

  static SimplexPath constant(SimplexPoint y, double horizon);

  /// Build from samples starting at t = 0, strictly increasing in t.
  /// Step: cadlag step path through the rows. Linear: continuous polyline.
  /// horizon < 0 means "last sample time"; larger horizons extend the final
  /// value as a constant hold.
  static SimplexPath from_samples(std::vector<Sample> samples, Interp interp,
                                  double horizon = -1.0);

  /// Piece-by-piece assembly for mixed paths (ramp, hold, jump, ...).
  class Builder {
  public:
    explicit Builder(SimplexPoint y0);
    Builder& hold_until(double t);
    Builder& linear_to(SimplexPoint y, double t);
    /// Jump at the current end time; must be followed by another piece or a
    /// strictly later finish() so the post-jump value occupies an interval.
    Builder& jump_to(SimplexPoint y);
    SimplexPath finish(double horizon);

  private:
    friend class SimplexPath;
    int k_;
    double t_ = 0.0;
    SimplexPoint cur_;
    bool pending_jump_ = false;
    std::vector<Seg> segs_;
  };

  SimplexPoint at(double t) const;
  SimplexPoint left_limit(double t) const;

  double horizon() const { return horizon_; }
  int dim() const { return k_; }

  /// Enumerate, in time order, the jumps in (c, d] and the continuous pieces
  /// clipped to [c, d]. This is the single source of truth for both total
  /// variation and semigroup construction.
  void visit(double c, double d, const std::function<void(const JumpPiece&)>& on_jump,
             const std::function<void(const LinearPiece&)>& on_linear) const;

  /// All segment/table boundary times (including 0 and horizon), for export.
  std::vector<double> breakpoints() const;

private:
  SimplexPath() = default;

  std::vector<Seg> segs_;
  double horizon_ = 0.0;
  int k_ = 0;

  const Seg& seg_containing(double t) const;
  SimplexPoint eval_in_seg(const Seg& s, double t) const;
  void validate() const;
};

struct SimplexPath::Seg {
  enum Kind { Constant, Linear, Sampled };
  double t0, t1;
  Kind kind;
  SimplexPoint a, b;          // Constant: a; Linear: a -> b
  std::vector<Sample> table;  // Sampled: step-right rows, table[0].t == t0
};

/// Total variation of the path over [c, d] in tv_distance units: the supremum
/// over partitions of sum tv(Y_{s_i}, Y_{s_{i+1}}). Exact for this segment
/// algebra: linear pieces contribute endpoint distance (coordinates are
/// monotone along a ramp), step tables and boundaries contribute their jumps.
double path_total_variation(const SimplexPath& p, double c, double d);

}
