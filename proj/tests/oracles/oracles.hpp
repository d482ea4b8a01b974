// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

// Test-only reference computations. Nothing here calls into the library's
// waveform, synapse or distribution code.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace synlab::oracle {

struct DefaultSpike {
  double a_plus = 0.9;
  double t_plus = 1.0;
  double a_minus = 0.4;
  double t_minus = 5.0;

  // Closed-form default spike: ramp tail on [-t_minus, 0), pulse on [0, t_plus).
  double operator()(double t) const {
    if (t >= -t_minus && t < 0.0) return -a_minus * (1.0 + t / t_minus);
    if (t >= 0.0 && t < t_plus) return a_plus;
    return 0.0;
  }

  std::vector<double> edges() const { return {-t_minus, 0.0, t_plus}; }
};

struct SampledPeaks {
  double max = 0.0;
  double min = 0.0;
};

/// Dense sampling of alpha * s(t - delay) - s(t - dt) at `step`, plus the
/// value just left of and at every edge of both shifted spikes.
inline SampledPeaks dense_sample_peaks(const DefaultSpike& s, double alpha, double delay, double dt,
                                       double step = 1e-4) {
  auto net = [&](double t) { return alpha * s(t - delay) - s(t - dt); };
  SampledPeaks out;
  auto take = [&](double v) {
    out.max = std::max(out.max, v);
    out.min = std::min(out.min, v);
  };
  const double lo = std::min(delay, dt) - s.t_minus - 1.0;
  const double hi = std::max(delay, dt) + s.t_plus + 1.0;
  const auto count = static_cast<std::int64_t>((hi - lo) / step);
  for (std::int64_t i = 0; i <= count; ++i) {
    take(net(lo + static_cast<double>(i) * step));
  }
  for (double shift : {delay, dt}) {
    for (double e : s.edges()) {
      take(net(e + shift));
      take(net(e + shift - 1e-12));
    }
  }
  return out;
}

/// Peak formulas for the default spike with attenuation on the pre side.
inline double closed_form_set_peak(const DefaultSpike& s, double alpha, double dt) {
  if (dt > 0.0 && dt < s.t_minus + s.t_plus) {
    return s.a_plus * alpha + s.a_minus * (1.0 - std::max(0.0, dt - s.t_plus) / s.t_minus);
  }
  return s.a_plus * alpha;
}

inline double closed_form_reset_peak(const DefaultSpike& s, double alpha, double dt) {
  if (dt < 0.0 && dt > -(s.t_minus + s.t_plus)) {
    return -(s.a_plus + s.a_minus * alpha * (1.0 - std::max(0.0, -dt - s.t_plus) / s.t_minus));
  }
  return -s.a_plus;
}

/// Poisson-binomial PMF by enumerating all 2^n outcomes.
inline std::vector<double> enumerate_pmf(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> pmf(n + 1, 0.0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double w = 1.0;
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) {
        w *= p[i];
        ++k;
      } else {
        w *= 1.0 - p[i];
      }
    }
    pmf[static_cast<std::size_t>(k)] += w;
  }
  return pmf;
}

inline double binomial_coefficient(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return c;
}

inline std::vector<double> binomial_pmf(int n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    pmf[static_cast<std::size_t>(k)] =
        binomial_coefficient(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  return pmf;
}

/// Least-squares line from the 2x2 normal equations by Cramer's rule.
inline std::pair<double, double> normal_equation_line(const std::vector<double>& x,
                                                      const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  return {(sy * sxx - sx * sxy) / det, (n * sxy - sx * sy) / det};
}

// Reference values computed with mpmath at 40 digits by
// tests/oracles/reference_values.py.

struct Ref {
  double x;
  double value;
};

inline constexpr Ref kNormalCdf[] = {
    {-8, 6.2209605742717841235e-16},  {-6, 9.865876450376981407e-10},
    {-5, 2.8665157187919391167e-7},   {-4, 0.000031671241833119921254},
    {-3.5, 0.00023262907903552503635}, {-3, 0.0013498980316300945267},
    {-2.2, 0.013903447513498604313},  {-2, 0.0227501319481792072},
    {-1.4, 0.080756659233771059795},  {-1, 0.15865525393145705141},
    {-0.5, 0.30853753872598689636},   {-0.1, 0.46017216272297101633},
    {0, 0.5},                         {0.3, 0.61791142218895263307},
    {0.8, 0.78814460141660332729},    {1, 0.84134474606854294859},
    {2, 0.9772498680518207928},       {2.2, 0.98609655248650139569},
    {3, 0.99865010196836990547},      {5, 0.99999971334842812081},
};

// Quantiles at the exact binary64 value of each probability.
inline constexpr Ref kNormalQuantile[] = {
    {1e-15, -7.9413453261709967713},      {1e-10, -6.3613409024040561991},
    {1e-5, -4.2648907939228246102},       {0.001, -3.0902323061678135354},
    {0.02425, -1.9729610513118848376},    {0.1, -1.2815515655446004353},
    {0.3, -0.52440051270804081597},       {0.5, 0.0},
    {0.7, 0.52440051270804065631},        {0.97575, 1.9729610513118849594},
    {0.999, 3.0902323061678132778},       {0.99999, 4.2648907939238407699},
    {0.999999999999999, 7.9414444874159788106},
};

// Expected number of SET switches for the default 16-device synapse.
inline constexpr Ref kDefaultSetMean[] = {
    {0.1, 12.42866023302178}, {0.5, 12.42866023302178}, {0.99, 12.42866023302178},
    {1.0, 12.42866023302178}, {1.5, 11.064712832295621}, {2.0, 9.565386983206188},
    {2.5, 7.9999999999999996}, {3.0, 6.4346130167938146}, {3.5, 4.9352871677043806},
    {4.0, 3.5713397669782224}, {4.5, 2.409301913660717}, {5.0, 1.4968853595595707},
};

// Expected number of RESET switches (magnitude) for the default synapse.
inline constexpr Ref kDefaultResetMean[] = {
    {-5.0, 5.7611485274256373}, {-4.0, 9.731492468675226}, {-3.0, 12.976620393821362},
    {-2.0, 14.824910603285812}, {-1.0, 15.617474246520145}, {-0.5, 15.617474246520145},
};

// Per-device SET probabilities at dt = 2, alpha = 0.6 .. 1.
inline constexpr double kDefaultPSetAtDt2[] = {
    0.08075665923, 0.1230244031, 0.1787863796, 0.2482522305, 0.3299685537, 0.4207402906,
    0.5159534369,  0.6102612476, 0.6984682125, 0.7763727076, 0.8413447461, 0.8925123029,
    0.9305633767,  0.9572837792, 0.9750021049, 0.9860965525,
};

}  // namespace synlab::oracle
