// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synlab/comparison.hpp"
#include "synlab/config.hpp"
#include "synlab/device.hpp"
#include "synlab/errors.hpp"
#include "synlab/experiment.hpp"
#include "synlab/fitting.hpp"
#include "synlab/report.hpp"

namespace synlab::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kFitError = 2, kIoError = 3 };

namespace detail {

// Options shared by the Monte Carlo subcommands.
struct RunOptions {
  std::string config;
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool figure_mode = false;
  bool svg = false;
  bool strict = false;
  std::string out_dir;
};

inline void add_run_options(CLI::App& sub, RunOptions& o, const std::string& default_dir) {
  o.out_dir = default_dir;
  sub.add_option("--config", o.config, "JSON run configuration");
  sub.add_option("--epochs", o.epochs, "Monte Carlo epochs per grid point");
  sub.add_option("--seed", o.seed, "64-bit RNG seed");
  sub.add_option("--threads", o.threads, "worker threads (0 = auto; env SYNLAB_THREADS)");
  sub.add_flag("--figure-mode", o.figure_mode, "add timing jitter and level noise to samples");
  sub.add_flag("--svg", o.svg, "write window.svg (always written in figure mode)");
  sub.add_flag("--strict", o.strict, "exit with code 2 if any fit diverges");
  sub.add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
}

inline RunConfig config_from(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

inline RunConfig effective_config(const RunOptions& o) {
  RunConfig cfg = config_from(o.config);
  if (o.epochs) cfg.protocol.epochs = *o.epochs;
  if (o.seed) cfg.protocol.seed = *o.seed;
  if (o.figure_mode) cfg.protocol.figure_mode = true;
  cfg.resolve();
  return cfg;
}

inline unsigned thread_count(const std::optional<unsigned>& flag) {
  if (flag) {
    return *flag;
  }
  if (const char* env = std::getenv("SYNLAB_THREADS"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(env, &used);
      if (used == std::string(env).size()) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception&) {
    }
    throw ConfigError("SYNLAB_THREADS must be a non-negative integer");
  }
  return 0;
}

inline bool any_diverged(const std::vector<FitResult>& fits) {
  for (const FitResult& f : fits) {
    if (f.status == FitStatus::diverged) return true;
  }
  return false;
}

inline void write_mode_products(const fs::path& dir, const ModeRun& run, unsigned threads,
                                bool svg, std::optional<FitModel> overlay) {
  ensure_directory(dir);
  write_file_atomic(dir / "samples.csv", samples_csv(run.window));
  write_file_atomic(dir / "summary.csv", summary_csv(run.window));
  write_file_atomic(dir / "states.csv", states_csv(run.window));
  write_file_atomic(dir / "curves.csv", curves_csv(run.window));
  write_file_atomic(dir / "fits.json", fits_json(run.fits, run.config.fit.target).dump(2) + "\n");
  nlohmann::json run_json = config_to_json(run.config);
  run_json["run"] = {{"label", run.label},
                     {"seed", run.window.seed},
                     {"threads", threads},
                     {"wall_time_s", run.window.wall_time_s}};
  write_file_atomic(dir / "run.json", run_json.dump(2) + "\n");
  if (svg || run.config.protocol.figure_mode) {
    SvgOptions opts;
    opts.title = "STDP window (" + run.label + ")";
    opts.overlay = overlay;
    write_file_atomic(dir / "window.svg", render_svg(run.window, run.fits, opts));
  }
}

// Writes to a file when a path is given, otherwise to `out`.
inline void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file_atomic(path, content);
  }
}

}  // namespace detail

/// Entry point shared by the `synlab` binary and the integration tests.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"synlab: STDP simulator for parallel bistable-device synapses"};
  app.name("synlab");
  app.require_subcommand(1);

  detail::RunOptions window_opts;
  CLI::App* window = app.add_subcommand("stdp-window", "Monte Carlo STDP window");
  detail::add_run_options(*window, window_opts, "stdp_window");

  detail::RunOptions compare_opts;
  CLI::App* compare = app.add_subcommand("compare", "dendritic vs flat compound synapse");
  detail::add_run_options(*compare, compare_opts, "compare");

  std::string config_path;
  std::string out_path;

  double vmin = -2.0;
  double vmax = 2.0;
  std::size_t steps = 401;
  CLI::App* device = app.add_subcommand("device-curve", "switching probability vs voltage");
  device->add_option("--config", config_path, "JSON run configuration");
  device->add_option("--vmin", vmin)->capture_default_str();
  device->add_option("--vmax", vmax)->capture_default_str();
  device->add_option("--steps", steps)->capture_default_str();
  device->add_option("--out", out_path, "output CSV (stdout if omitted)");

  CLI::App* curves = app.add_subcommand("curves", "per-device switching probabilities vs dt");
  curves->add_option("--config", config_path, "JSON run configuration");
  curves->add_option("--out", out_path, "output CSV (stdout if omitted)");

  CLI::App* states = app.add_subcommand("states", "analytic conductance-state probabilities vs dt");
  states->add_option("--config", config_path, "JSON run configuration");
  states->add_option("--out", out_path, "output CSV (stdout if omitted)");

  double wf_step = 0.01;
  std::optional<double> t_min;
  std::optional<double> t_max;
  CLI::App* wave = app.add_subcommand("waveform", "sample the spike waveform");
  wave->add_option("--config", config_path, "JSON run configuration");
  wave->add_option("--step", wf_step, "sampling step in time units")->capture_default_str();
  wave->add_option("--tmin", t_min, "start time (default: start of support)");
  wave->add_option("--tmax", t_max, "end time (default: end of support)");
  wave->add_option("--out", out_path, "output CSV (stdout if omitted)");

  std::string input_path;
  std::string target_name;
  bool fit_strict = false;
  CLI::App* fit = app.add_subcommand("fit", "refit a summary.csv");
  fit->add_option("--input", input_path, "summary.csv from stdp-window")->required();
  fit->add_option("--target", target_name, "mode or mean (default from config)");
  fit->add_option("--config", config_path, "JSON run configuration (fit domains)");
  fit->add_option("--out", out_path, "output JSON (stdout if omitted)");
  fit->add_flag("--strict", fit_strict, "exit with code 2 if any fit diverges");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("synlab");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_storage) {
    argv.push_back(s.data());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*window) {
      const RunConfig cfg = detail::effective_config(window_opts);
      const unsigned threads = detail::thread_count(window_opts.threads);
      const ModeRun run_result = run_mode("dendritic", cfg, threads);
      detail::write_mode_products(window_opts.out_dir, run_result, threads, window_opts.svg,
                                  std::nullopt);
      if (window_opts.strict && detail::any_diverged(run_result.fits)) {
        throw FitError("at least one window fit diverged");
      }
    } else if (*compare) {
      const RunConfig cfg = detail::effective_config(compare_opts);
      const unsigned threads = detail::thread_count(compare_opts.threads);
      const Comparison c = compare_modes(cfg, threads);
      const fs::path dir = compare_opts.out_dir;
      detail::write_mode_products(dir / "dendritic", c.dendritic, threads, compare_opts.svg,
                                  FitModel::exponential);
      detail::write_mode_products(dir / "flat", c.flat, threads, compare_opts.svg,
                                  FitModel::linear);
      write_file_atomic(dir / "comparison.json", comparison_json(c).dump(2) + "\n");
      if (compare_opts.strict &&
          (detail::any_diverged(c.dendritic.fits) || detail::any_diverged(c.flat.fits))) {
        throw FitError("at least one window fit diverged");
      }
    } else if (*device) {
      const RunConfig cfg = detail::config_from(config_path);
      detail::emit(out_path, device_curve_csv(device_curve(cfg.device, vmin, vmax, steps)), out);
    } else if (*curves) {
      const RunConfig cfg = detail::config_from(config_path);
      const auto grid = cfg.protocol.grid.points();
      detail::emit(out_path,
                   curves_csv(grid, per_device_probability_curves(build_synapse(cfg),
                                                                  build_waveform(cfg), grid)),
                   out);
    } else if (*states) {
      const RunConfig cfg = detail::config_from(config_path);
      const auto grid = cfg.protocol.grid.points();
      detail::emit(out_path,
                   states_csv(grid, state_probability_curves(build_synapse(cfg),
                                                             build_waveform(cfg), grid)),
                   out);
    } else if (*wave) {
      const RunConfig cfg = detail::config_from(config_path);
      const SpikeWaveform w = build_waveform(cfg);
      detail::emit(out_path,
                   waveform_csv(w, t_min.value_or(w.support_begin()),
                                t_max.value_or(w.support_end()), wf_step),
                   out);
    } else if (*fit) {
      const RunConfig cfg = detail::config_from(config_path);
      const FitTarget target = target_name.empty() ? cfg.fit.target : parse_fit_target(target_name);
      const auto rows = parse_summary_csv(read_file(input_path));
      const auto fits = fit_window(rows, target, cfg.fit.domains);
      detail::emit(out_path, fits_json(fits, target).dump(2) + "\n", out);
      if (fit_strict && detail::any_diverged(fits)) {
        throw FitError("at least one window fit diverged");
      }
    }
  } catch (const ConfigError& e) {
    err << "synlab: configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FitError& e) {
    err << "synlab: " << e.what() << '\n';
    return kFitError;
  } catch (const IoError& e) {
    err << "synlab: I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "synlab: I/O error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}

}  // namespace synlab::cli
