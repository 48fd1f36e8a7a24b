#include "simplexmc/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace simplexmc {

namespace {

SimplexPoint lerp(const SimplexPoint& a, const SimplexPoint& b, double w) {
  int k = a.dim();
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = a[i] + w * (b[i] - a[i]);
  return SimplexPoint(std::move(out));
}

}

// ---- construction ----------------------------------------------------------

SimplexPath SimplexPath::constant(SimplexPoint y, double horizon) {
  SimplexPath p;
  p.k_ = y.dim();
  p.horizon_ = horizon;
  p.segs_.push_back(Seg{0.0, horizon, Seg::Constant, y, y, {}});
  p.validate();
  return p;
}

SimplexPath SimplexPath::from_samples(std::vector<Sample> samples, Interp interp,
                                      double horizon) {
  if (samples.empty()) throw std::invalid_argument("SimplexPath: no samples");
  if (samples.front().t != 0.0) throw std::invalid_argument("SimplexPath: first sample must be at t=0");
  int k = samples.front().y.dim();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].y.dim() != k) throw std::invalid_argument("SimplexPath: mixed dimensions");
    if (!std::isfinite(samples[i].t)) throw std::invalid_argument("SimplexPath: non-finite time");
    if (i > 0 && samples[i].t <= samples[i - 1].t) {
      throw std::invalid_argument("SimplexPath: sample times must strictly increase");
    }
  }
  double last = samples.back().t;
  if (horizon < 0.0) horizon = last;
  if (horizon < last) throw std::invalid_argument("SimplexPath: horizon before last sample");
  if (horizon == 0.0) throw std::invalid_argument("SimplexPath: zero horizon");

  SimplexPath p;
  p.k_ = k;
  p.horizon_ = horizon;
  if (interp == Interp::Step) {
    p.segs_.push_back(Seg{0.0, horizon, Seg::Sampled, samples.front().y, samples.back().y,
                          std::move(samples)});
  } else {
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      p.segs_.push_back(Seg{samples[i].t, samples[i + 1].t, Seg::Linear, samples[i].y,
                            samples[i + 1].y, {}});
    }
    if (samples.size() == 1 || horizon > last) {
      p.segs_.push_back(Seg{last, horizon, Seg::Constant, samples.back().y, samples.back().y, {}});
    }
  }
  p.validate();
  return p;
}

SimplexPath::Builder::Builder(SimplexPoint y0) : k_(y0.dim()), cur_(std::move(y0)) {}

SimplexPath::Builder& SimplexPath::Builder::hold_until(double t) {
  if (t <= t_) throw std::invalid_argument("Builder::hold_until: time must advance");
  segs_.push_back(Seg{t_, t, Seg::Constant, cur_, cur_, {}});
  t_ = t;
  pending_jump_ = false;
  return *this;
}

SimplexPath::Builder& SimplexPath::Builder::linear_to(SimplexPoint y, double t) {
  if (t <= t_) throw std::invalid_argument("Builder::linear_to: time must advance");
  if (y.dim() != k_) throw std::invalid_argument("Builder::linear_to: dimension mismatch");
  segs_.push_back(Seg{t_, t, Seg::Linear, cur_, y, {}});
  cur_ = std::move(y);
  t_ = t;
  pending_jump_ = false;
  return *this;
}

SimplexPath::Builder& SimplexPath::Builder::jump_to(SimplexPoint y) {
  if (y.dim() != k_) throw std::invalid_argument("Builder::jump_to: dimension mismatch");
  cur_ = std::move(y);
  pending_jump_ = true;
  return *this;
}

SimplexPath SimplexPath::Builder::finish(double horizon) {
  if (horizon > t_) {
    segs_.push_back(Seg{t_, horizon, Seg::Constant, cur_, cur_, {}});
    t_ = horizon;
    pending_jump_ = false;
  }
  if (pending_jump_) {
    throw std::invalid_argument("Builder::finish: jump at the horizon has no interval to live on");
  }
  if (segs_.empty()) throw std::invalid_argument("Builder::finish: empty path");
  SimplexPath p;
  p.k_ = k_;
  p.horizon_ = t_;
  p.segs_ = std::move(segs_);
  p.validate();
  return p;
}

void SimplexPath::validate() const {
  if (k_ < 1 || k_ > kMaxColors) throw std::invalid_argument("SimplexPath: bad dimension");
  if (!std::isfinite(horizon_) || horizon_ <= 0.0) {
    throw std::invalid_argument("SimplexPath: horizon must be positive and finite");
  }
  if (segs_.empty()) throw std::invalid_argument("SimplexPath: no segments");
  if (segs_.front().t0 != 0.0) throw std::invalid_argument("SimplexPath: must start at t=0");
  if (segs_.back().t1 != horizon_) throw std::invalid_argument("SimplexPath: must end at horizon");
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Seg& s = segs_[i];
    if (!(s.t0 < s.t1)) throw std::invalid_argument("SimplexPath: empty or inverted segment");
    if (i > 0 && segs_[i - 1].t1 != s.t0) {
      throw std::invalid_argument("SimplexPath: segments must tile without gaps or overlaps");
    }
    if (s.kind == Seg::Sampled) {
      if (s.table.empty() || s.table.front().t != s.t0) {
        throw std::invalid_argument("SimplexPath: sampled table must start at segment start");
      }
      if (s.table.back().t > s.t1) {
        throw std::invalid_argument("SimplexPath: sampled table exceeds segment");
      }
    }
  }
}

// ---- evaluation ------------------------------------------------------------

const SimplexPath::Seg& SimplexPath::seg_containing(double t) const {
  if (t < 0.0 || t > horizon_) {
    throw std::invalid_argument("SimplexPath: time " + std::to_string(t) + " outside [0, horizon]");
  }
  if (t >= segs_.back().t0) return segs_.back();
  // first segment with t0 > t, step back one
  auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                             [](double v, const Seg& s) { return v < s.t0; });
  return *(it - 1);
}

SimplexPoint SimplexPath::eval_in_seg(const Seg& s, double t) const {
  switch (s.kind) {
    case Seg::Constant:
      return s.a;
    case Seg::Linear: {
      double w = (t - s.t0) / (s.t1 - s.t0);
      return lerp(s.a, s.b, w);
    }
    case Seg::Sampled: {
      auto it = std::upper_bound(s.table.begin(), s.table.end(), t,
                                 [](double v, const Sample& r) { return v < r.t; });
      return (it - 1)->y;
    }
  }
  throw std::logic_error("SimplexPath: unknown segment kind");
}

SimplexPoint SimplexPath::at(double t) const {
  return eval_in_seg(seg_containing(t), t);
}

SimplexPoint SimplexPath::left_limit(double t) const {
  if (t <= 0.0) return at(0.0);
  if (t > horizon_) throw std::invalid_argument("SimplexPath: time outside [0, horizon]");
  // segment containing times just below t
  auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                             [](double v, const Seg& s) { return v <= s.t0; });
  const Seg& s = *(it - 1);
  if (s.kind == Seg::Sampled) {
    auto jt = std::upper_bound(s.table.begin(), s.table.end(), t,
                               [](double v, const Sample& r) { return v <= r.t; });
    return (jt - 1)->y;
  }
  return eval_in_seg(s, std::min(t, s.t1));
}

// ---- pieces ----------------------------------------------------------------

void SimplexPath::visit(double c, double d, const std::function<void(const JumpPiece&)>& on_jump,
                        const std::function<void(const LinearPiece&)>& on_linear) const {
  if (!(c <= d)) throw std::invalid_argument("SimplexPath::visit: c > d");
  if (c < 0.0 || d > horizon_) throw std::invalid_argument("SimplexPath::visit: window outside path");
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Seg& s = segs_[i];
    if (s.t1 < c || s.t0 > d) continue;
    // boundary jump where the previous segment hands over to this one
    if (i > 0 && s.t0 > c && s.t0 <= d) {
      const Seg& prev = segs_[i - 1];
      SimplexPoint pre = eval_in_seg(prev, prev.t1);
      SimplexPoint post = s.kind == Seg::Sampled ? s.table.front().y : eval_in_seg(s, s.t0);
      if (tv_distance(pre, post) > 0.0) on_jump(JumpPiece{s.t0, std::move(pre), std::move(post)});
    }
    switch (s.kind) {
      case Seg::Constant:
        break;
      case Seg::Linear: {
        double a = std::max(c, s.t0), b = std::min(d, s.t1);
        if (a < b) {
          SimplexPoint ya = eval_in_seg(s, a), yb = eval_in_seg(s, b);
          if (tv_distance(ya, yb) > 0.0) on_linear(LinearPiece{a, b, std::move(ya), std::move(yb)});
        }
        break;
      }
      case Seg::Sampled: {
        for (std::size_t r = 1; r < s.table.size(); ++r) {
          double t = s.table[r].t;
          if (t <= c || t > d) continue;
          if (tv_distance(s.table[r - 1].y, s.table[r].y) > 0.0) {
            on_jump(JumpPiece{t, s.table[r - 1].y, s.table[r].y});
          }
        }
        break;
      }
    }
  }
}

std::vector<double> SimplexPath::breakpoints() const {
  std::vector<double> out;
  out.push_back(0.0);
  for (const Seg& s : segs_) {
    if (s.kind == Seg::Sampled) {
      for (const Sample& r : s.table) {
        if (r.t > out.back()) out.push_back(r.t);
      }
    }
    if (s.t1 > out.back()) out.push_back(s.t1);
  }
  return out;
}

double path_total_variation(const SimplexPath& p, double c, double d) {
  double total = 0.0;
  p.visit(
      c, d, [&](const SimplexPath::JumpPiece& j) { total += tv_distance(j.pre, j.post); },
      [&](const SimplexPath::LinearPiece& l) { total += tv_distance(l.y0, l.y1); });
  return total;
}

}
