// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "synlab/errors.hpp"
#include "synlab/normal.hpp"

namespace synlab {

/// Bistable resistive device with a Gaussian-distributed switching threshold.
struct DeviceModel {
  double v_th_set = 1.0;     // mean SET threshold, volts
  double v_th_reset = -1.0;  // mean RESET threshold, volts
  double sigma_set = 0.1;
  double sigma_reset = 0.1;
  double r_on = 1.0;     // ohms, normalized
  double r_off = 1000.0;  // ohms
  // Force zero probability unless the peak exceeds the mean threshold.
  bool gate_below_threshold = false;

  void validate() const {
    detail::require(std::isfinite(v_th_set) && v_th_set > 0.0, "device.v_th_set must be > 0");
    detail::require(std::isfinite(v_th_reset) && v_th_reset < 0.0,
                    "device.v_th_reset must be < 0");
    detail::require(std::isfinite(sigma_set) && sigma_set > 0.0, "device.sigma_set must be > 0");
    detail::require(std::isfinite(sigma_reset) && sigma_reset > 0.0,
                    "device.sigma_reset must be > 0");
    detail::require(std::isfinite(r_on) && r_on > 0.0, "device.r_on must be > 0");
    detail::require(std::isfinite(r_off) && r_off > r_on, "device.r_off must exceed r_on");
  }
};

enum class DeviceState : std::uint8_t { off, on };

inline double conductance(const DeviceModel& m, DeviceState s) {
  return s == DeviceState::on ? 1.0 / m.r_on : 1.0 / m.r_off;
}

namespace detail {

// Integral over [0, v] of a Gaussian density centred on `threshold`.
inline double threshold_crossing_probability(double v, double threshold, double sigma,
                                             bool gated) {
  if (v <= 0.0 || (gated && v <= threshold)) {
    return 0.0;
  }
  const double p = normal_cdf((v - threshold) / sigma) - normal_cdf(-threshold / sigma);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace detail

/// Probability that an OFF device switches ON under a positive peak.
inline double set_probability(const DeviceModel& m, double v_peak) {
  return detail::threshold_crossing_probability(v_peak, m.v_th_set, m.sigma_set,
                                                m.gate_below_threshold);
}

/// Probability that an ON device switches OFF under a negative peak.
inline double reset_probability(const DeviceModel& m, double v_peak) {
  return detail::threshold_crossing_probability(-v_peak, -m.v_th_reset, m.sigma_reset,
                                                m.gate_below_threshold);
}

/// One stochastic switching decision driven by a single uniform draw u.
inline DeviceState sample_transition(DeviceState s, double p_set, double p_reset, double u) {
  if (s == DeviceState::off) {
    return u < p_set ? DeviceState::on : DeviceState::off;
  }
  return u < p_reset ? DeviceState::off : DeviceState::on;
}

struct DeviceCurvePoint {
  double voltage = 0.0;
  double p_set = 0.0;
  double p_reset = 0.0;
};

inline std::vector<DeviceCurvePoint> device_curve(const DeviceModel& m, double v_min, double v_max,
                                                  std::size_t steps) {
  detail::require(steps >= 2, "device curve needs at least 2 steps");
  detail::require(std::isfinite(v_min) && std::isfinite(v_max) && v_min < v_max,
                  "device curve needs v_min < v_max");
  std::vector<DeviceCurvePoint> out;
  out.reserve(steps);
  const double span = v_max - v_min;
  for (std::size_t i = 0; i < steps; ++i) {
    const double v = v_min + span * static_cast<double>(i) / static_cast<double>(steps - 1);
    out.push_back({v, set_probability(m, v), reset_probability(m, v)});
  }
  return out;
}

}  // namespace synlab
