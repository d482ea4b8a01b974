// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "synlab/config.hpp"
#include "synlab/experiment.hpp"
#include "synlab/fitting.hpp"
#include "synlab/report.hpp"

namespace synlab {

struct ModeRun {
  std::string label;
  RunConfig config;
  StdpWindowResult window;
  std::vector<FitResult> fits;
};

inline ModeRun run_mode(std::string label, const RunConfig& cfg, unsigned threads) {
  ModeRun run{std::move(label), cfg, {}, {}};
  run.window = run_stdp_window(build_synapse(cfg), build_waveform(cfg), cfg.protocol, threads);
  run.fits = fit_window(run.window, cfg.fit.target, cfg.fit.domains);
  return run;
}

struct Comparison {
  ModeRun dendritic;
  ModeRun flat;
};

/// The configured (dendritic) synapse against the same synapse with every
/// attenuation set to 1, on the same seed.
inline Comparison compare_modes(const RunConfig& cfg, unsigned threads = 1) {
  return {run_mode("dendritic", cfg, threads), run_mode("flat", flat_baseline(cfg), threads)};
}

inline nlohmann::json comparison_json(const Comparison& c) {
  auto side_table = [](const ModeRun& run) {
    nlohmann::json table = nlohmann::json::object();
    for (const FitResult& f : run.fits) {
      table[std::string(to_string(f.side))][std::string(to_string(f.model))] =
          f.status == FitStatus::skipped ? nlohmann::json(nullptr) : nlohmann::json(f.r_squared);
    }
    return table;
  };
  nlohmann::json out;
  out["seed"] = c.dendritic.config.protocol.seed;
  out["target"] = to_string(c.dendritic.config.fit.target);
  for (const ModeRun* run : {&c.dendritic, &c.flat}) {
    out[run->label] = {{"fits", fits_json(run->fits, run->config.fit.target)},
                       {"r_squared", side_table(*run)},
                       {"alphas", run->config.synapse.alphas}};
  }
  return out;
}

}  // namespace synlab
