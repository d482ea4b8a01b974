// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synlab/errors.hpp"

namespace synlab {

/// One linear piece of a spike, covering the half-open interval [t_start, t_end).
struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  double v_start = 0.0;
  double v_end = 0.0;

  double interpolate(double t) const {
    const double f = (t - t_start) / (t_end - t_start);
    return v_start + f * (v_end - v_start);
  }
};

/// Piecewise-linear spike shape. Zero outside the union of its segments.
class SpikeWaveform {
 public:
  SpikeWaveform() = default;

  explicit SpikeWaveform(std::vector<Segment> segments) : segments_(std::move(segments)) {
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      detail::require(std::isfinite(s.t_start) && std::isfinite(s.t_end) &&
                          std::isfinite(s.v_start) && std::isfinite(s.v_end),
                      "waveform segment has non-finite values");
      detail::require(s.t_start < s.t_end, "waveform segment must satisfy t_start < t_end");
      if (i > 0) {
        detail::require(segments_[i - 1].t_end <= s.t_start,
                        "waveform segments must be sorted and non-overlapping");
      }
    }
  }

  /// Value at t. Segments are closed on the left, so this is right-continuous.
  double operator()(double t) const {
    for (const Segment& s : segments_) {
      if (t < s.t_start) {
        break;
      }
      if (t < s.t_end) {
        return s.interpolate(t);
      }
    }
    return 0.0;
  }

  /// lim_{x -> t-} of the waveform.
  double left_limit(double t) const {
    for (const Segment& s : segments_) {
      if (t <= s.t_start) {
        break;
      }
      if (t <= s.t_end) {
        return s.interpolate(t);
      }
    }
    return 0.0;
  }

  SpikeWaveform scaled(double factor) const {
    SpikeWaveform out = *this;
    for (Segment& s : out.segments_) {
      s.v_start *= factor;
      s.v_end *= factor;
    }
    return out;
  }

  std::span<const Segment> segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  double support_begin() const { return segments_.empty() ? 0.0 : segments_.front().t_start; }
  double support_end() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }

 private:
  std::vector<Segment> segments_;
};

inline double evaluate(const SpikeWaveform& w, double t) { return w(t); }

/// Amplitudes and spans of the default STDP spike.
struct WaveformParams {
  double a_plus = 0.9;   // volts, positive pulse amplitude
  double t_plus = 1.0;   // time units, pulse width
  double a_minus = 0.4;  // volts, peak magnitude of the negative tail
  double t_minus = 5.0;  // time units, tail span

  void validate() const {
    detail::require(std::isfinite(a_plus) && a_plus > 0.0, "waveform.a_plus must be > 0");
    detail::require(std::isfinite(t_plus) && t_plus > 0.0, "waveform.t_plus must be > 0");
    detail::require(std::isfinite(a_minus) && a_minus >= 0.0, "waveform.a_minus must be >= 0");
    detail::require(std::isfinite(t_minus) && t_minus >= 0.0, "waveform.t_minus must be >= 0");
  }
};

/// The two-piece STDP spike, fire time at t = 0.
///
/// The negative tail occupies [-t_minus, 0) and ramps from 0 V down to
/// -a_minus right before firing; the pulse holds +a_plus on [0, t_plus).
/// With this orientation a causal pair (post fires after pre) puts the
/// pre pulse on top of the deepest part of the post tail, which gives
/// potentiation for dt > 0, a plateau for dt in (0, t_plus), and a
/// depression side governed by the smaller tail amplitude.
inline SpikeWaveform make_default_waveform(const WaveformParams& params) {
  params.validate();
  std::vector<Segment> segments;
  if (params.t_minus > 0.0) {
    segments.push_back({-params.t_minus, 0.0, 0.0, -params.a_minus});
  }
  segments.push_back({0.0, params.t_plus, params.a_plus, params.a_plus});
  return SpikeWaveform(std::move(segments));
}

enum class AttenuatedSide { pre, post };

/// Extremes of the net potential across one device for a single spike pair.
struct NetPeaks {
  double v_set_peak = 0.0;    // sup_t of the net potential
  double v_reset_peak = 0.0;  // inf_t of the net potential
  double t_at_set = 0.0;
  double t_at_reset = 0.0;
};

/// Net potential across a device at time t, for a pre spike fired at 0 and a
/// post spike fired at dt. The attenuated spike is scaled by alpha and
/// shifted by the branch delay:
///   side == pre:  alpha * pre(t - delay) - post(t - dt)
///   side == post: pre(t) - alpha * post(t - dt - delay)
inline double net_potential(const SpikeWaveform& pre, const SpikeWaveform& post, double alpha,
                            double delay, double dt, double t,
                            AttenuatedSide side = AttenuatedSide::pre) {
  if (side == AttenuatedSide::pre) {
    return alpha * pre(t - delay) - post(t - dt);
  }
  return pre(t) - alpha * post(t - dt - delay);
}

namespace detail {

inline double net_potential_left(const SpikeWaveform& pre, const SpikeWaveform& post,
                                 double alpha, double delay, double dt, double t,
                                 AttenuatedSide side) {
  if (side == AttenuatedSide::pre) {
    return alpha * pre.left_limit(t - delay) - post.left_limit(t - dt);
  }
  return pre.left_limit(t) - alpha * post.left_limit(t - dt - delay);
}

}  // namespace detail

/// Exact supremum and infimum of net_potential over t.
///
/// Both terms are piecewise linear, so between consecutive breakpoints of the
/// two shifted waveforms the net potential is linear and its extremes are
/// the one-sided limits at the interval ends.
inline NetPeaks net_peaks(const SpikeWaveform& pre, const SpikeWaveform& post, double alpha,
                          double delay, double dt, AttenuatedSide side = AttenuatedSide::pre) {
  const double pre_shift = side == AttenuatedSide::pre ? delay : 0.0;
  const double post_shift = side == AttenuatedSide::pre ? dt : dt + delay;

  // Small fixed buffer; the default waveforms contribute 6 breakpoints.
  std::vector<double> breaks;
  breaks.reserve(2 * (pre.segments().size() + post.segments().size()));
  for (const Segment& s : pre.segments()) {
    breaks.push_back(s.t_start + pre_shift);
    breaks.push_back(s.t_end + pre_shift);
  }
  for (const Segment& s : post.segments()) {
    breaks.push_back(s.t_start + post_shift);
    breaks.push_back(s.t_end + post_shift);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Far from every breakpoint both spikes are silent.
  NetPeaks peaks;
  peaks.t_at_set = breaks.empty() ? 0.0 : breaks.front();
  peaks.t_at_reset = peaks.t_at_set;
  auto consider = [&peaks](double v, double t) {
    if (v > peaks.v_set_peak) {
      peaks.v_set_peak = v;
      peaks.t_at_set = t;
    }
    if (v < peaks.v_reset_peak) {
      peaks.v_reset_peak = v;
      peaks.t_at_reset = t;
    }
  };
  for (double t : breaks) {
    consider(detail::net_potential_left(pre, post, alpha, delay, dt, t, side), t);
    consider(net_potential(pre, post, alpha, delay, dt, t, side), t);
  }
  return peaks;
}

}  // namespace synlab
