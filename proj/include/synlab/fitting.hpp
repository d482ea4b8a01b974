// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synlab/errors.hpp"
#include "synlab/experiment.hpp"

namespace synlab {

enum class FitModel { exponential, linear };
enum class FitSide { set, reset };
enum class FitTarget { mode, mean };
enum class FitStatus { ok, skipped, diverged };

inline std::string_view to_string(FitModel m) {
  return m == FitModel::exponential ? "exponential" : "linear";
}
inline std::string_view to_string(FitSide s) { return s == FitSide::set ? "set" : "reset"; }
inline std::string_view to_string(FitTarget t) { return t == FitTarget::mode ? "mode" : "mean"; }
inline std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::ok:
      return "ok";
    case FitStatus::skipped:
      return "skipped";
    case FitStatus::diverged:
      return "diverged";
  }
  return "ok";
}

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
};

struct FitDomain {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// y = a * exp(b * x) or y = a + b * x.
struct FitResult {
  FitModel model = FitModel::linear;
  FitSide side = FitSide::set;
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
  std::size_t n_excluded = 0;  // non-positive ordinates dropped by the exponential fit
  FitDomain domain;
  bool converged = false;
  int iterations = 0;
  FitStatus status = FitStatus::ok;

  double predict(double x) const {
    return model == FitModel::exponential ? a * std::exp(b * x) : a + b * x;
  }
};

namespace detail {

inline FitDomain span_of(std::span<const FitPoint> points) {
  if (points.empty()) {
    return {};
  }
  FitDomain d{points.front().x, points.front().x};
  for (const FitPoint& p : points) {
    d.lo = std::min(d.lo, p.x);
    d.hi = std::max(d.hi, p.x);
  }
  return d;
}

template <typename Model>
double sum_squared_residuals(std::span<const FitPoint> points, Model&& model) {
  double ss = 0.0;
  for (const FitPoint& p : points) {
    const double r = p.y - model(p.x);
    ss += r * r;
  }
  return ss;
}

// 1 - SS_res / SS_tot; a constant series fitted exactly counts as R^2 = 1.
inline double r_squared(std::span<const FitPoint> points, double ss_res) {
  double mean = 0.0;
  for (const FitPoint& p : points) {
    mean += p.y;
  }
  mean /= static_cast<double>(points.size());
  double ss_tot = 0.0;
  for (const FitPoint& p : points) {
    ss_tot += (p.y - mean) * (p.y - mean);
  }
  if (ss_tot == 0.0) {
    const double scale = std::max(1.0, mean * mean * static_cast<double>(points.size()));
    return ss_res <= 1e-24 * scale ? 1.0 : 0.0;
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace detail

/// Ordinary least squares line. Throws ConfigError when fewer than two points
/// or all abscissae coincide.
inline FitResult fit_linear(std::span<const FitPoint> points) {
  detail::require(points.size() >= 2, "linear fit needs at least 2 points");
  const double count = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const FitPoint& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= count;
  my /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const FitPoint& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  detail::require(sxx > 0.0, "linear fit needs at least two distinct abscissae");

  FitResult fit;
  fit.model = FitModel::linear;
  fit.b = sxy / sxx;
  fit.a = my - fit.b * mx;
  fit.n_points = points.size();
  fit.domain = detail::span_of(points);
  fit.converged = true;
  fit.r_squared = detail::r_squared(
      points, detail::sum_squared_residuals(points, [&](double x) { return fit.a + fit.b * x; }));
  return fit;
}

/// Two-parameter exponential y = a * exp(b * x).
///
/// Starts from the log-linear least-squares solution and refines with
/// Gauss-Newton on the original residuals. Each step is halved until it
/// does not increase SS_res (at most 20 halvings); iteration stops when the
/// relative parameter change drops below 1e-9 or after 100 iterations.
/// Points with y <= 0 are dropped and counted in n_excluded. When `ss_trace`
/// is given it receives SS_res at the start point and after every accepted step.
inline FitResult fit_exponential(std::span<const FitPoint> points, FitSide side = FitSide::set,
                                 std::vector<double>* ss_trace = nullptr) {
  constexpr int kMaxIterations = 100;
  constexpr int kMaxHalvings = 20;
  constexpr double kTolerance = 1e-9;

  FitResult fit;
  fit.model = FitModel::exponential;
  fit.side = side;

  std::vector<FitPoint> positive;
  std::vector<FitPoint> logs;
  for (const FitPoint& p : points) {
    if (p.y > 0.0 && std::isfinite(p.y)) {
      positive.push_back(p);
      logs.push_back({p.x, std::log(p.y)});
    } else {
      ++fit.n_excluded;
    }
  }
  fit.n_points = positive.size();
  fit.domain = detail::span_of(positive);
  if (positive.size() < 3) {
    fit.status = FitStatus::skipped;
    return fit;
  }

  double a = 0.0;
  double b = 0.0;
  try {
    const FitResult seed = fit_linear(logs);
    a = std::exp(seed.a);
    b = seed.b;
  } catch (const ConfigError&) {
    fit.status = FitStatus::skipped;
    return fit;
  }

  auto ssr = [&](double aa, double bb) {
    return detail::sum_squared_residuals(positive, [&](double x) { return aa * std::exp(bb * x); });
  };
  double ss = ssr(a, b);
  if (ss_trace) ss_trace->push_back(ss);
  bool converged = false;
  int iteration = 0;
  for (; iteration < kMaxIterations && !converged; ++iteration) {
    // Normal equations J^T J delta = J^T r for the 2x2 Jacobian.
    double jaa = 0.0;
    double jab = 0.0;
    double jbb = 0.0;
    double ga = 0.0;
    double gb = 0.0;
    for (const FitPoint& p : positive) {
      const double e = std::exp(b * p.x);
      const double da = e;
      const double db = a * p.x * e;
      const double r = p.y - a * e;
      jaa += da * da;
      jab += da * db;
      jbb += db * db;
      ga += da * r;
      gb += db * r;
    }
    const double det = jaa * jbb - jab * jab;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
      converged = ss == 0.0;
      break;
    }
    const double step_a = (jbb * ga - jab * gb) / det;
    const double step_b = (jaa * gb - jab * ga) / det;

    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      const double na = a + scale * step_a;
      const double nb = b + scale * step_b;
      const double nss = ssr(na, nb);
      if (std::isfinite(nss) && nss <= ss) {
        accepted = true;
        const double change = std::max(std::abs(na - a) / std::max(std::abs(a), 1e-8),
                                       std::abs(nb - b) / std::max(std::abs(b), 1e-8));
        a = na;
        b = nb;
        ss = nss;
        if (ss_trace) ss_trace->push_back(ss);
        converged = change < kTolerance;
        break;
      }
    }
    if (!accepted) {
      // No descent direction left at working precision.
      converged = true;
    }
  }

  fit.a = a;
  fit.b = b;
  fit.iterations = iteration;
  fit.converged = converged && std::isfinite(a) && std::isfinite(b) && a > 0.0;
  fit.status = fit.converged ? FitStatus::ok : FitStatus::diverged;
  fit.r_squared = detail::r_squared(positive, ss);
  return fit;
}

/// Per-grid-point values that the window fits read from.
struct WindowSummaryRow {
  double dt = 0.0;
  double mean = 0.0;
  double mode = 0.0;
};

inline std::vector<WindowSummaryRow> summary_rows(const StdpWindowResult& window) {
  std::vector<WindowSummaryRow> rows;
  rows.reserve(window.points.size());
  for (const GridPointResult& p : window.points) {
    rows.push_back({p.dt, p.mean, static_cast<double>(p.mode)});
  }
  return rows;
}

struct FitDomains {
  FitDomain set{1.0, 5.0};
  FitDomain reset{-5.0, -1.0};
};

/// Exponential and linear fits on both sides of the window.
///
/// The RESET side is fitted on the depression magnitude -dg so that both
/// sides use a positive amplitude; plotting code negates it back.
/// Order: exponential/set, exponential/reset, linear/set, linear/reset.
inline std::vector<FitResult> fit_window(const std::vector<WindowSummaryRow>& rows,
                                         FitTarget target, const FitDomains& domains = {}) {
  std::vector<FitResult> out;
  for (FitModel model : {FitModel::exponential, FitModel::linear}) {
    for (FitSide side : {FitSide::set, FitSide::reset}) {
      const FitDomain& domain = side == FitSide::set ? domains.set : domains.reset;
      std::vector<FitPoint> pts;
      for (const WindowSummaryRow& r : rows) {
        if (!domain.contains(r.dt)) {
          continue;
        }
        const double y = target == FitTarget::mode ? r.mode : r.mean;
        pts.push_back({r.dt, side == FitSide::set ? y : -y});
      }
      FitResult fit;
      if (model == FitModel::exponential) {
        fit = fit_exponential(pts, side);
      } else {
        const FitDomain span = detail::span_of(pts);
        if (pts.size() < 2 || span.lo == span.hi) {
          fit.model = FitModel::linear;
          fit.n_points = pts.size();
          fit.status = FitStatus::skipped;
        } else {
          fit = fit_linear(pts);
        }
      }
      fit.side = side;
      if (fit.status == FitStatus::skipped) {
        fit.domain = domain;
      }
      out.push_back(fit);
    }
  }
  return out;
}

inline std::vector<FitResult> fit_window(const StdpWindowResult& window, FitTarget target,
                                         const FitDomains& domains = {}) {
  return fit_window(summary_rows(window), target, domains);
}

}  // namespace synlab
