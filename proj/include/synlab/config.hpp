// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <fstream>
#include <initializer_list>
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

using json = nlohmann::json;

struct SynapseConfig {
  std::size_t n = 16;
  double alpha_min = 0.6;
  double alpha_max = 1.0;
  // Explicit per-branch values; when empty they are derived from n and the range.
  std::vector<double> alphas;
  std::vector<double> delays;
  AttenuatedSide attenuate_side = AttenuatedSide::pre;
};

struct FitConfig {
  FitDomains domains;
  FitTarget target = FitTarget::mode;
};

/// Every knob of a run. Defaults reproduce the reference setup: 16 devices,
/// attenuations 0.6..1, thresholds +-1 V with sigma 0.1, 0.9 V / 1 tu pulse
/// and 0.4 V / 5 tu tail, 10,000 epochs over dt in [-5, 5].
struct RunConfig {
  WaveformParams waveform;
  DeviceModel device;
  SynapseConfig synapse;
  StdpProtocol protocol;
  FitConfig fit;

  /// Fills alphas / delays from n and the range, then validates everything.
  void resolve() {
    waveform.validate();
    device.validate();
    protocol.validate();
    detail::require(synapse.n >= 1 && synapse.n <= 4096, "synapse.n must lie in [1, 4096]");
    if (synapse.alphas.empty()) {
      synapse.alphas.clear();
      for (const DendriticBranch& b :
           make_linear_attenuators(synapse.n, synapse.alpha_min, synapse.alpha_max)) {
        synapse.alphas.push_back(b.alpha);
      }
    } else {
      detail::require(synapse.n == synapse.alphas.size(),
                      "synapse.n must equal the length of synapse.alphas");
    }
    if (synapse.delays.empty()) {
      synapse.delays.assign(synapse.alphas.size(), 0.0);
    }
    detail::require(synapse.delays.size() == synapse.alphas.size(),
                    "synapse.delays must have one entry per branch");
    detail::require(fit.domains.set.lo <= fit.domains.set.hi &&
                        fit.domains.reset.lo <= fit.domains.reset.hi,
                    "fit domains must be [lo, hi] with lo <= hi");
    // Constructing the synapse checks alpha ranges and delays.
    (void)CompoundSynapse(branches(), device, synapse.attenuate_side);
  }

  std::vector<DendriticBranch> branches() const {
    std::vector<DendriticBranch> out;
    for (std::size_t i = 0; i < synapse.alphas.size(); ++i) {
      out.push_back({synapse.alphas[i], i < synapse.delays.size() ? synapse.delays[i] : 0.0});
    }
    return out;
  }
};

inline SpikeWaveform build_waveform(const RunConfig& cfg) {
  return make_default_waveform(cfg.waveform);
}

inline CompoundSynapse build_synapse(const RunConfig& cfg) {
  return CompoundSynapse(cfg.branches(), cfg.device, cfg.synapse.attenuate_side);
}

/// Same run without dendritic processing: every attenuation is 1.
inline RunConfig flat_baseline(RunConfig cfg) {
  cfg.synapse.alpha_min = 1.0;
  cfg.synapse.alpha_max = 1.0;
  cfg.synapse.alphas.assign(cfg.synapse.n, 1.0);
  return cfg;
}

// String forms -------------------------------------------------------------

inline std::string to_string(const InitPolicy& p) {
  switch (p.kind) {
    case InitPolicy::Kind::polarity_split:
      return "polarity-split";
    case InitPolicy::Kind::all_off:
      return "all-off";
    case InitPolicy::Kind::all_on:
      return "all-on";
    case InitPolicy::Kind::bernoulli:
      return "bernoulli:" + json(p.p_on).dump();
  }
  return "polarity-split";
}

inline InitPolicy parse_init_policy(std::string_view s) {
  if (s == "polarity-split") return {InitPolicy::Kind::polarity_split};
  if (s == "all-off") return {InitPolicy::Kind::all_off};
  if (s == "all-on") return {InitPolicy::Kind::all_on};
  if (s == "bernoulli") return {InitPolicy::Kind::bernoulli, 0.5};
  constexpr std::string_view prefix = "bernoulli:";
  if (s.substr(0, prefix.size()) == prefix) {
    const std::string_view num = s.substr(prefix.size());
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p);
    if (ec == std::errc{} && ptr == num.data() + num.size() && p >= 0.0 && p <= 1.0) {
      return {InitPolicy::Kind::bernoulli, p};
    }
  }
  throw ConfigError("unknown protocol.init_policy '" + std::string(s) +
                    "' (expected polarity-split, all-off, all-on or bernoulli:<p>)");
}

inline std::string_view to_string(AttenuatedSide s) {
  return s == AttenuatedSide::pre ? "pre" : "post";
}

inline AttenuatedSide parse_attenuated_side(std::string_view s) {
  if (s == "pre") return AttenuatedSide::pre;
  if (s == "post") return AttenuatedSide::post;
  throw ConfigError("synapse.attenuate_side must be 'pre' or 'post'");
}

inline FitTarget parse_fit_target(std::string_view s) {
  if (s == "mode") return FitTarget::mode;
  if (s == "mean") return FitTarget::mean;
  throw ConfigError("fit target must be 'mode' or 'mean'");
}

// JSON ---------------------------------------------------------------------

namespace detail {

inline void reject_unknown_keys(const json& obj, std::string_view section,
                                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config section '" + std::string(section) + "' must be an object");
  }
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view k : allowed) {
      known = known || item.key() == k;
    }
    if (!known) {
      throw ConfigError("unknown config key '" + std::string(section) + "." + item.key() + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    out = it->template get<T>();
  }
}

// Counts must be non-negative integers; a plain get<size_t> would wrap negatives.
inline void read_count(const json& obj, const char* key, std::size_t& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    require(it->is_number_unsigned(), std::string(key) + " must be a non-negative integer");
    out = it->get<std::size_t>();
  }
}

inline void read_domain(const json& obj, const char* key, FitDomain& out) {
  if (auto it = obj.find(key); it != obj.end()) {
    const auto v = it->get<std::vector<double>>();
    require(v.size() == 2, std::string("fit.") + key + " must be [lo, hi]");
    out = {v[0], v[1]};
  }
}

}  // namespace detail

inline RunConfig config_from_json(const json& root) {
  RunConfig cfg;
  try {
    detail::reject_unknown_keys(root, "<root>",
                                {"waveform", "device", "synapse", "protocol", "fit", "run"});
    if (auto it = root.find("waveform"); it != root.end()) {
      const json& w = *it;
      detail::reject_unknown_keys(w, "waveform", {"a_plus", "t_plus", "a_minus", "t_minus"});
      detail::read(w, "a_plus", cfg.waveform.a_plus);
      detail::read(w, "t_plus", cfg.waveform.t_plus);
      detail::read(w, "a_minus", cfg.waveform.a_minus);
      detail::read(w, "t_minus", cfg.waveform.t_minus);
    }
    if (auto it = root.find("device"); it != root.end()) {
      const json& d = *it;
      detail::reject_unknown_keys(d, "device",
                                  {"v_th_set", "v_th_reset", "sigma_set", "sigma_reset", "r_on",
                                   "r_off", "gate_below_threshold"});
      detail::read(d, "v_th_set", cfg.device.v_th_set);
      detail::read(d, "v_th_reset", cfg.device.v_th_reset);
      detail::read(d, "sigma_set", cfg.device.sigma_set);
      detail::read(d, "sigma_reset", cfg.device.sigma_reset);
      detail::read(d, "r_on", cfg.device.r_on);
      detail::read(d, "r_off", cfg.device.r_off);
      detail::read(d, "gate_below_threshold", cfg.device.gate_below_threshold);
    }
    if (auto it = root.find("synapse"); it != root.end()) {
      const json& s = *it;
      detail::reject_unknown_keys(
          s, "synapse", {"n", "alpha_min", "alpha_max", "alphas", "delays", "attenuate_side"});
      detail::read(s, "alpha_min", cfg.synapse.alpha_min);
      detail::read(s, "alpha_max", cfg.synapse.alpha_max);
      detail::read(s, "alphas", cfg.synapse.alphas);
      detail::read(s, "delays", cfg.synapse.delays);
      if (s.contains("n")) {
        detail::read_count(s, "n", cfg.synapse.n);
      } else if (!cfg.synapse.alphas.empty()) {
        cfg.synapse.n = cfg.synapse.alphas.size();
      }
      if (auto side = s.find("attenuate_side"); side != s.end()) {
        cfg.synapse.attenuate_side = parse_attenuated_side(side->get<std::string>());
      }
    }
    if (auto it = root.find("protocol"); it != root.end()) {
      const json& p = *it;
      detail::reject_unknown_keys(p, "protocol",
                                  {"dt_min", "dt_max", "dt_step", "epochs", "init_policy",
                                   "jitter_sigma", "noise_sigma", "figure_mode", "seed"});
      detail::read(p, "dt_min", cfg.protocol.grid.min);
      detail::read(p, "dt_max", cfg.protocol.grid.max);
      detail::read(p, "dt_step", cfg.protocol.grid.step);
      detail::read_count(p, "epochs", cfg.protocol.epochs);
      if (auto init = p.find("init_policy"); init != p.end()) {
        cfg.protocol.init = parse_init_policy(init->get<std::string>());
      }
      detail::read(p, "jitter_sigma", cfg.protocol.jitter_sigma);
      detail::read(p, "noise_sigma", cfg.protocol.noise_sigma);
      detail::read(p, "figure_mode", cfg.protocol.figure_mode);
      if (auto seed = p.find("seed"); seed != p.end()) {
        detail::require(seed->is_number_unsigned(), "protocol.seed must be a non-negative integer");
        cfg.protocol.seed = seed->get<std::uint64_t>();
      }
    }
    if (auto it = root.find("fit"); it != root.end()) {
      const json& f = *it;
      detail::reject_unknown_keys(f, "fit", {"set_domain", "reset_domain", "target"});
      detail::read_domain(f, "set_domain", cfg.fit.domains.set);
      detail::read_domain(f, "reset_domain", cfg.fit.domains.reset);
      if (auto target = f.find("target"); target != f.end()) {
        cfg.fit.target = parse_fit_target(target->get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.resolve();
  return cfg;
}

/// The effective configuration. Feeding it back through config_from_json
/// reproduces the same RunConfig exactly.
inline json config_to_json(const RunConfig& cfg) {
  json root;
  root["waveform"] = {{"a_plus", cfg.waveform.a_plus},
                      {"t_plus", cfg.waveform.t_plus},
                      {"a_minus", cfg.waveform.a_minus},
                      {"t_minus", cfg.waveform.t_minus}};
  root["device"] = {{"v_th_set", cfg.device.v_th_set},
                    {"v_th_reset", cfg.device.v_th_reset},
                    {"sigma_set", cfg.device.sigma_set},
                    {"sigma_reset", cfg.device.sigma_reset},
                    {"r_on", cfg.device.r_on},
                    {"r_off", cfg.device.r_off},
                    {"gate_below_threshold", cfg.device.gate_below_threshold}};
  root["synapse"] = {{"n", cfg.synapse.n},
                     {"alpha_min", cfg.synapse.alpha_min},
                     {"alpha_max", cfg.synapse.alpha_max},
                     {"alphas", cfg.synapse.alphas},
                     {"delays", cfg.synapse.delays},
                     {"attenuate_side", to_string(cfg.synapse.attenuate_side)}};
  root["protocol"] = {{"dt_min", cfg.protocol.grid.min},
                      {"dt_max", cfg.protocol.grid.max},
                      {"dt_step", cfg.protocol.grid.step},
                      {"epochs", cfg.protocol.epochs},
                      {"init_policy", to_string(cfg.protocol.init)},
                      {"jitter_sigma", cfg.protocol.jitter_sigma},
                      {"noise_sigma", cfg.protocol.noise_sigma},
                      {"figure_mode", cfg.protocol.figure_mode},
                      {"seed", cfg.protocol.seed}};
  root["fit"] = {{"set_domain", {cfg.fit.domains.set.lo, cfg.fit.domains.set.hi}},
                 {"reset_domain", {cfg.fit.domains.reset.lo, cfg.fit.domains.reset.hi}},
                 {"target", to_string(cfg.fit.target)}};
  return root;
}

inline RunConfig default_config() {
  RunConfig cfg;
  cfg.resolve();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(root);
}

}  // namespace synlab
