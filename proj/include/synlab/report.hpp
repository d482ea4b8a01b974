// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "synlab/device.hpp"
#include "synlab/errors.hpp"
#include "synlab/experiment.hpp"
#include "synlab/fitting.hpp"
#include "synlab/synapse.hpp"
#include "synlab/waveform.hpp"

namespace synlab {

namespace fs = std::filesystem;

// Numbers ------------------------------------------------------------------

/// Shortest decimal that round-trips to the same double; '.' separator.
inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_number(std::string& out, long long v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline std::string format_number(double v) {
  std::string s;
  append_number(s, v);
  return s;
}

// Files --------------------------------------------------------------------

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partially written product.
inline void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// CSV products -------------------------------------------------------------

inline std::string samples_csv(const StdpWindowResult& r) {
  std::string out = "delta_t,epoch,delta_g,delta_g_noisy\n";
  out.reserve(out.size() + r.delta_g.size() * 24);
  for (std::size_t d = 0; d < r.points.size(); ++d) {
    for (std::size_t e = 0; e < r.epochs; ++e) {
      const std::size_t slot = d * r.epochs + e;
      append_number(out, r.points[d].dt);
      out += ',';
      append_number(out, static_cast<long long>(e));
      out += ',';
      append_number(out, static_cast<long long>(r.delta_g[slot]));
      out += ',';
      append_number(out, r.delta_g_noisy[slot]);
      out += '\n';
    }
  }
  return out;
}

inline std::string summary_csv(const StdpWindowResult& r) {
  std::string out = "delta_t,mean,std,mode,analytic_mean,analytic_mode,tvd\n";
  for (const GridPointResult& p : r.points) {
    append_number(out, p.dt);
    out += ',';
    append_number(out, p.mean);
    out += ',';
    append_number(out, p.std);
    out += ',';
    append_number(out, static_cast<long long>(p.mode));
    out += ',';
    append_number(out, p.analytic_mean);
    out += ',';
    append_number(out, static_cast<long long>(p.analytic_mode));
    out += ',';
    append_number(out, p.tvd);
    out += '\n';
  }
  return out;
}

/// Analytic P(dg = g) per grid point; g runs over the levels reachable in
/// that grid point's bank (0..n for dt >= 0, 0..-n for dt < 0).
inline std::string states_csv(const StdpWindowResult& r) {
  std::string out = "delta_t,g,probability\n";
  const int n = static_cast<int>(r.n);
  for (const GridPointResult& p : r.points) {
    const int sign = bank_for(p.dt) == Bank::set ? 1 : -1;
    for (int k = 0; k <= n; ++k) {
      const int g = sign * k;
      append_number(out, p.dt);
      out += ',';
      append_number(out, static_cast<long long>(g));
      out += ',';
      append_number(out, p.analytic_pmf[static_cast<std::size_t>(g + n)]);
      out += '\n';
    }
  }
  return out;
}

/// Same schema as states_csv, from state_probability_curves.
inline std::string states_csv(const std::vector<double>& grid,
                              const std::vector<std::vector<double>>& pmfs) {
  std::string out = "delta_t,g,probability\n";
  for (std::size_t d = 0; d < grid.size(); ++d) {
    const long long sign = bank_for(grid[d]) == Bank::set ? 1 : -1;
    for (std::size_t k = 0; k < pmfs[d].size(); ++k) {
      append_number(out, grid[d]);
      out += ',';
      append_number(out, sign * static_cast<long long>(k));
      out += ',';
      append_number(out, pmfs[d][k]);
      out += '\n';
    }
  }
  return out;
}

inline std::string curves_csv(const std::vector<double>& grid,
                              const std::vector<BranchProbabilities>& curves) {
  std::string out = "delta_t,device_index,alpha,v_set_peak,v_reset_peak,p_set,p_reset\n";
  for (std::size_t d = 0; d < grid.size(); ++d) {
    for (const BranchRecord& rec : curves[d]) {
      append_number(out, grid[d]);
      out += ',';
      append_number(out, static_cast<long long>(rec.index));
      out += ',';
      append_number(out, rec.alpha);
      out += ',';
      append_number(out, rec.v_set_peak);
      out += ',';
      append_number(out, rec.v_reset_peak);
      out += ',';
      append_number(out, rec.p_set);
      out += ',';
      append_number(out, rec.p_reset);
      out += '\n';
    }
  }
  return out;
}

inline std::string curves_csv(const StdpWindowResult& r) {
  std::vector<double> grid;
  for (const GridPointResult& p : r.points) {
    grid.push_back(p.dt);
  }
  return curves_csv(grid, r.curves);
}

inline std::string device_curve_csv(const std::vector<DeviceCurvePoint>& curve) {
  std::string out = "voltage,p_set,p_reset\n";
  for (const DeviceCurvePoint& p : curve) {
    append_number(out, p.voltage);
    out += ',';
    append_number(out, p.p_set);
    out += ',';
    append_number(out, p.p_reset);
    out += '\n';
  }
  return out;
}

/// Samples the waveform on [t_min, t_max] at the given step.
inline std::string waveform_csv(const SpikeWaveform& w, double t_min, double t_max, double step) {
  detail::require(std::isfinite(step) && step > 0.0, "waveform step must be > 0");
  detail::require(std::isfinite(t_min) && std::isfinite(t_max) && t_min <= t_max,
                  "waveform range must satisfy t_min <= t_max");
  std::string out = "t,voltage\n";
  const auto count = static_cast<std::size_t>(std::floor((t_max - t_min) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = std::round((t_min + static_cast<double>(i) * step) * 1e12) / 1e12;
    append_number(out, t);
    out += ',';
    append_number(out, w(t));
    out += '\n';
  }
  return out;
}

// summary.csv reader -------------------------------------------------------

namespace detail {

inline double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ConfigError("summary line " + std::to_string(line) + ": bad number '" +
                      std::string(field) + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<WindowSummaryRow> parse_summary_csv(std::string_view text) {
  constexpr std::string_view header = "delta_t,mean,std,mode,analytic_mean,analytic_mode,tvd";
  std::vector<WindowSummaryRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line_no == 1) {
      if (line != header) {
        throw ConfigError("summary file header must be '" + std::string(header) + "'");
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t comma = line.find(','); comma != std::string_view::npos;
         comma = line.find(',', start)) {
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 7) {
      throw ConfigError("summary line " + std::to_string(line_no) + " must have 7 fields");
    }
    rows.push_back({detail::parse_double(fields[0], line_no),
                    detail::parse_double(fields[1], line_no),
                    detail::parse_double(fields[3], line_no)});
  }
  if (line_no == 0) {
    throw ConfigError("summary file is empty");
  }
  return rows;
}

// JSON products ------------------------------------------------------------

namespace detail {

inline nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json fits_json(const std::vector<FitResult>& fits, FitTarget target) {
  nlohmann::json arr = nlohmann::json::array();
  for (const FitResult& f : fits) {
    arr.push_back({{"model", to_string(f.model)},
                   {"side", to_string(f.side)},
                   {"target", to_string(target)},
                   {"a", detail::finite_or_null(f.a)},
                   {"b", detail::finite_or_null(f.b)},
                   {"r_squared", detail::finite_or_null(f.r_squared)},
                   {"n_points", f.n_points},
                   {"n_excluded", f.n_excluded},
                   {"domain", {f.domain.lo, f.domain.hi}},
                   {"converged", f.converged},
                   {"iterations", f.iterations},
                   {"status", to_string(f.status)}});
  }
  return arr;
}

// SVG ----------------------------------------------------------------------

namespace detail {

inline std::string fixed2(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace detail

struct SvgOptions {
  std::string title = "STDP window";
  // Which fit family to overlay; both when unset.
  std::optional<FitModel> overlay;
  double width = 800.0;
  double height = 520.0;
};

/// Density scatter of (dt, noisy dg) with fitted curves on top.
///
/// Figure-mode samples are binned per grid point into quarter-level bins and
/// drawn with opacity proportional to the bin count. Without figure-mode
/// samples one marker per grid point is drawn at the modal level instead.
inline std::string render_svg(const StdpWindowResult& window, const std::vector<FitResult>& fits,
                              const SvgOptions& options = {}) {
  const double left = 70.0;
  const double right = 20.0;
  const double top = 40.0;
  const double bottom = 60.0;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;

  const int n = std::max<int>(1, static_cast<int>(window.n));
  double x_lo = -5.0;
  double x_hi = 5.0;
  if (!window.points.empty()) {
    x_lo = window.points.front().dt;
    x_hi = window.points.back().dt;
    if (x_lo == x_hi) {
      x_lo -= 1.0;
      x_hi += 1.0;
    }
  }
  const double y_lo = -(n + 1.0);
  const double y_hi = n + 1.0;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * plot_h; };
  using detail::fixed2;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << fixed2(options.width) << "\" height=\"" << fixed2(options.height) << "\" viewBox=\"0 0 "
      << fixed2(options.width) << ' ' << fixed2(options.height) << "\">\n"
      << "<title>" << detail::xml_escape(options.title) << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fixed2(options.width) << "\" height=\""
      << fixed2(options.height) << "\" fill=\"white\"/>\n";

  // Axes with ticks.
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
      << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\""
      << fixed2(left + plot_w) << "\" y2=\"" << fixed2(top + plot_h) << "\"/>\n"
      << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left)
      << "\" y2=\"" << fixed2(top + plot_h) << "\"/>\n"
      << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(sy(0.0)) << "\" x2=\""
      << fixed2(left + plot_w) << "\" y2=\"" << fixed2(sy(0.0))
      << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n"
      << "</g>\n";

  svg << "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  const double x_span = x_hi - x_lo;
  const double x_step = x_span <= 12.0 ? 1.0 : std::pow(10.0, std::floor(std::log10(x_span / 2.0)));
  for (double x = std::ceil(x_lo / x_step) * x_step; x <= x_hi + 1e-9; x += x_step) {
    const double px = sx(x);
    svg << "<line class=\"xtick\" x1=\"" << fixed2(px) << "\" y1=\"" << fixed2(top + plot_h)
        << "\" x2=\"" << fixed2(px) << "\" y2=\"" << fixed2(top + plot_h + 5)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed2(px) << "\" y=\"" << fixed2(top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << format_number(std::round(x * 1e9) / 1e9) << "</text>\n";
  }
  const int y_step = n <= 8 ? 1 : 4;
  for (int y = -(n / y_step) * y_step; y <= n; y += y_step) {
    const double py = sy(y);
    svg << "<line class=\"ytick\" x1=\"" << fixed2(left - 5) << "\" y1=\"" << fixed2(py)
        << "\" x2=\"" << fixed2(left) << "\" y2=\"" << fixed2(py) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed2(left - 8) << "\" y=\"" << fixed2(py + 4)
        << "\" text-anchor=\"end\">" << y << "</text>\n";
  }
  svg << "</g>\n"
      << "<text x=\"" << fixed2(left + plot_w / 2) << "\" y=\"" << fixed2(options.height - 15)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
      << "&#916;t (time units)</text>\n"
      << "<text x=\"18\" y=\"" << fixed2(top + plot_h / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fixed2(top + plot_h / 2) << ")\">&#916;g (conductance levels)</text>\n"
      << "<text x=\"" << fixed2(left + plot_w / 2)
      << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">"
      << detail::xml_escape(options.title) << "</text>\n";

  // Samples.
  svg << "<g class=\"samples\" fill=\"#1f4e9c\" stroke=\"none\">\n";
  if (window.figure_mode && !window.delta_g_noisy.empty()) {
    for (std::size_t d = 0; d < window.points.size(); ++d) {
      std::map<long long, std::size_t> bins;
      for (std::size_t e = 0; e < window.epochs; ++e) {
        const double v = window.delta_g_noisy[d * window.epochs + e];
        ++bins[std::llround(v * 4.0)];
      }
      std::size_t peak = 0;
      for (const auto& [bin, count] : bins) {
        peak = std::max(peak, count);
      }
      for (const auto& [bin, count] : bins) {
        const double opacity = 0.04 + 0.96 * static_cast<double>(count) / static_cast<double>(peak);
        svg << "<circle class=\"sample\" cx=\"" << fixed2(sx(window.points[d].dt)) << "\" cy=\""
            << fixed2(sy(static_cast<double>(bin) / 4.0)) << "\" r=\"2.2\" fill-opacity=\""
            << fixed2(opacity) << "\"/>\n";
      }
    }
  } else {
    for (const GridPointResult& p : window.points) {
      svg << "<circle class=\"mode\" cx=\"" << fixed2(sx(p.dt)) << "\" cy=\"" << fixed2(sy(p.mode))
          << "\" r=\"2.5\"/>\n";
    }
  }
  svg << "</g>\n";

  // Fitted curves.
  svg << "<g class=\"fits\" fill=\"none\" stroke-width=\"2\">\n";
  for (const FitResult& f : fits) {
    if (f.status != FitStatus::ok || (options.overlay && *options.overlay != f.model)) {
      continue;
    }
    const double sign = f.side == FitSide::set ? 1.0 : -1.0;
    const char* colour = f.model == FitModel::exponential ? "#d62728" : "#2ca02c";
    svg << "<polyline class=\"fit " << to_string(f.model) << ' ' << to_string(f.side)
        << "\" stroke=\"" << colour << "\" points=\"";
    constexpr int kSamples = 100;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = f.domain.lo + (f.domain.hi - f.domain.lo) * i / kSamples;
      const double y = std::clamp(sign * f.predict(x), y_lo, y_hi);
      svg << (i ? " " : "") << fixed2(sx(x)) << ',' << fixed2(sy(y));
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace synlab
