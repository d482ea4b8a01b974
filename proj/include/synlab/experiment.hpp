// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "synlab/errors.hpp"
#include "synlab/rng.hpp"
#include "synlab/synapse.hpp"
#include "synlab/waveform.hpp"

namespace synlab {

/// Arithmetic grid of relative spike timings dt = t_post - t_pre.
struct DtGrid {
  double min = -5.0;
  double max = 5.0;
  double step = 0.1;

  void validate() const {
    detail::require(std::isfinite(min) && std::isfinite(max) && min <= max,
                    "protocol.dt_min must not exceed protocol.dt_max");
    detail::require(std::isfinite(step) && step > 0.0, "protocol.dt_step must be > 0");
    detail::require((max - min) / step < 1e6, "dt grid has too many points");
  }

  std::size_t size() const {
    return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  }

  /// Grid points snapped to 1e-12 so that e.g. -5 + 70 * 0.1 is exactly 2.
  std::vector<double> points() const {
    validate();
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double raw = min + static_cast<double>(i) * step;
      out[i] = std::round(raw * 1e12) / 1e12;
    }
    return out;
  }
};

struct InitPolicy {
  enum class Kind { polarity_split, all_off, all_on, bernoulli };
  Kind kind = Kind::polarity_split;
  double p_on = 0.5;  // bernoulli only
};

struct StdpProtocol {
  DtGrid grid;
  std::size_t epochs = 10000;
  InitPolicy init;
  double jitter_sigma = 0.05;  // time units, figure mode only
  double noise_sigma = 0.25;   // conductance levels, figure mode only
  bool figure_mode = false;
  std::uint64_t seed = 1;

  void validate() const {
    grid.validate();
    detail::require(epochs >= 1, "protocol.epochs must be >= 1");
    detail::require(std::isfinite(jitter_sigma) && jitter_sigma >= 0.0,
                    "protocol.jitter_sigma must be >= 0");
    detail::require(std::isfinite(noise_sigma) && noise_sigma >= 0.0,
                    "protocol.noise_sigma must be >= 0");
    if (init.kind == InitPolicy::Kind::bernoulli) {
      detail::require(init.p_on >= 0.0 && init.p_on <= 1.0,
                      "bernoulli init probability must lie in [0, 1]");
    }
  }
};

/// Which transition a spike pair can drive. dt = 0 belongs to the SET bank.
enum class Bank { set, reset };

inline Bank bank_for(double dt) { return dt >= 0.0 ? Bank::set : Bank::reset; }

struct GridPointResult {
  double dt = 0.0;
  // Indexed by level + n, levels -n..n.
  std::vector<std::size_t> histogram;
  double mean = 0.0;
  double std = 0.0;
  int mode = 0;
  std::vector<double> analytic_pmf;
  double analytic_mean = 0.0;
  double analytic_variance = 0.0;
  int analytic_mode = 0;
  double tvd = 0.0;
};

struct StdpWindowResult {
  std::size_t n = 0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;
  bool figure_mode = false;
  std::vector<GridPointResult> points;
  // Un-jittered per-device probabilities at each grid point.
  std::vector<BranchProbabilities> curves;
  // Raw samples, row-major [grid point][epoch].
  std::vector<int> delta_g;
  std::vector<double> delta_g_noisy;
  double wall_time_s = 0.0;

  int level_count() const { return static_cast<int>(2 * n + 1); }
};

namespace detail {

// Draw slots inside one epoch.
inline constexpr std::uint32_t kJitterDraw = 0;
inline constexpr std::uint32_t kNoiseDraw = 1;
inline constexpr std::uint32_t kFirstDeviceDraw = 2;

// The pair only drives the bank's own transition.
inline void mask_to_bank(BranchProbabilities& probs, Bank bank) {
  for (BranchRecord& r : probs) {
    (bank == Bank::set ? r.p_reset : r.p_set) = 0.0;
  }
}

// Probability that device i switches, folding in the chance it starts in a
// state from which the bank's transition is possible.
inline std::vector<double> switching_probabilities(const BranchProbabilities& probs, Bank bank,
                                                   const InitPolicy& init) {
  double ready = 1.0;
  switch (init.kind) {
    case InitPolicy::Kind::polarity_split:
      ready = 1.0;
      break;
    case InitPolicy::Kind::all_off:
      ready = bank == Bank::set ? 1.0 : 0.0;
      break;
    case InitPolicy::Kind::all_on:
      ready = bank == Bank::set ? 0.0 : 1.0;
      break;
    case InitPolicy::Kind::bernoulli:
      ready = bank == Bank::set ? 1.0 - init.p_on : init.p_on;
      break;
  }
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out[i] = ready * (bank == Bank::set ? probs[i].p_set : probs[i].p_reset);
  }
  return out;
}

inline void initialize_states(std::span<DeviceState> states, Bank bank, const InitPolicy& init,
                              const RngStream& rng, std::uint32_t d, std::uint64_t e) {
  switch (init.kind) {
    case InitPolicy::Kind::polarity_split:
      std::fill(states.begin(), states.end(),
                bank == Bank::set ? DeviceState::off : DeviceState::on);
      break;
    case InitPolicy::Kind::all_off:
      std::fill(states.begin(), states.end(), DeviceState::off);
      break;
    case InitPolicy::Kind::all_on:
      std::fill(states.begin(), states.end(), DeviceState::on);
      break;
    case InitPolicy::Kind::bernoulli: {
      const auto first = kFirstDeviceDraw + static_cast<std::uint32_t>(states.size());
      for (std::size_t i = 0; i < states.size(); ++i) {
        const double u = rng.uniform(d, e, first + static_cast<std::uint32_t>(i));
        states[i] = u < init.p_on ? DeviceState::on : DeviceState::off;
      }
      break;
    }
  }
}

// Visits levels in order 0, 1, -1, 2, -2, ... so ties resolve toward small |level|.
template <typename Weights>
int mode_level(const Weights& weights, int n) {
  int best = 0;
  auto best_weight = weights[static_cast<std::size_t>(n)];
  for (int k = 1; k <= n; ++k) {
    for (int level : {k, -k}) {
      const auto w = weights[static_cast<std::size_t>(level + n)];
      if (w > best_weight) {
        best_weight = w;
        best = level;
      }
    }
  }
  return best;
}

// PMF over counts 0..n mapped onto signed levels -n..n for the given bank.
inline std::vector<double> signed_pmf(const std::vector<double>& counts_pmf, Bank bank) {
  const std::size_t n = counts_pmf.size() - 1;
  std::vector<double> out(2 * n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    out[bank == Bank::set ? n + k : n - k] = counts_pmf[k];
  }
  return out;
}

inline std::size_t resolve_threads(unsigned requested) {
  if (requested == 0) {
    requested = std::max(1u, std::thread::hardware_concurrency());
  }
  return requested;
}

}  // namespace detail

/// Epoch-based Monte Carlo of the STDP window.
///
/// Every epoch is an independent trial: a fresh initial bank, one spike
/// pair, one recorded conductance change. Results are identical for any
/// `threads` value because every draw is addressed by (grid point, epoch,
/// slot) and each grid point's results land in fixed slots.
inline StdpWindowResult run_stdp_window(const CompoundSynapse& synapse, const SpikeWaveform& spike,
                                        const StdpProtocol& protocol, unsigned threads = 1) {
  protocol.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::vector<double> grid = protocol.grid.points();
  const std::size_t n = synapse.size();
  const std::size_t epochs = protocol.epochs;
  const int ni = static_cast<int>(n);

  StdpWindowResult result;
  result.n = n;
  result.epochs = epochs;
  result.seed = protocol.seed;
  result.figure_mode = protocol.figure_mode;
  result.points.resize(grid.size());
  result.curves.resize(grid.size());
  result.delta_g.resize(grid.size() * epochs);
  result.delta_g_noisy.resize(grid.size() * epochs);

  const RngStream rng(protocol.seed);
  const bool jitter = protocol.figure_mode && protocol.jitter_sigma > 0.0;

  auto run_point = [&](std::size_t d, std::vector<DeviceState>& states,
                       std::vector<double>& draws) {
    const double dt = grid[d];
    const Bank bank = bank_for(dt);
    const auto di = static_cast<std::uint32_t>(d);

    BranchProbabilities nominal = branch_probabilities(synapse, spike, spike, dt);
    result.curves[d] = nominal;
    GridPointResult& point = result.points[d];
    point.dt = dt;
    point.histogram.assign(2 * n + 1, 0);

    const std::vector<double> switching =
        detail::switching_probabilities(nominal, bank, protocol.init);
    point.analytic_pmf = detail::signed_pmf(state_distribution(switching), bank);
    for (double p : switching) {
      point.analytic_mean += bank == Bank::set ? p : -p;
      point.analytic_variance += p * (1.0 - p);
    }
    point.analytic_mode = detail::mode_level(point.analytic_pmf, ni);

    detail::mask_to_bank(nominal, bank);
    BranchProbabilities jittered;
    for (std::size_t e = 0; e < epochs; ++e) {
      const BranchProbabilities* probs = &nominal;
      if (jitter) {
        const double dt_jittered = dt + protocol.jitter_sigma * rng.normal(di, e, detail::kJitterDraw);
        jittered = branch_probabilities(synapse, spike, spike, dt_jittered);
        detail::mask_to_bank(jittered, bank);
        probs = &jittered;
      }
      detail::initialize_states(states, bank, protocol.init, rng, di, e);
      for (std::size_t i = 0; i < n; ++i) {
        draws[i] = rng.uniform(di, e, detail::kFirstDeviceDraw + static_cast<std::uint32_t>(i));
      }
      const TransitionCounts counts = apply_spike_pair(states, *probs, draws);
      const int dg = static_cast<int>(counts.set_count) - static_cast<int>(counts.reset_count);

      const std::size_t slot = d * epochs + e;
      result.delta_g[slot] = dg;
      result.delta_g_noisy[slot] =
          protocol.figure_mode ? dg + protocol.noise_sigma * rng.normal(di, e, detail::kNoiseDraw)
                               : static_cast<double>(dg);
      ++point.histogram[static_cast<std::size_t>(dg + ni)];
    }

    const double total = static_cast<double>(epochs);
    double sum = 0.0;
    for (int level = -ni; level <= ni; ++level) {
      sum += level * static_cast<double>(point.histogram[static_cast<std::size_t>(level + ni)]);
    }
    point.mean = sum / total;
    double sq = 0.0;
    double tvd = 0.0;
    for (int level = -ni; level <= ni; ++level) {
      const auto idx = static_cast<std::size_t>(level + ni);
      const double c = static_cast<double>(point.histogram[idx]);
      sq += c * (level - point.mean) * (level - point.mean);
      tvd += std::abs(c / total - point.analytic_pmf[idx]);
    }
    point.std = std::sqrt(sq / total);
    point.tvd = std::min(1.0, 0.5 * tvd);
    point.mode = detail::mode_level(point.histogram, ni);
  };

  const std::size_t workers = std::min(detail::resolve_threads(threads), grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    std::vector<DeviceState> states(n);
    std::vector<double> draws(n);
    try {
      for (std::size_t d = next++; d < grid.size(); d = next++) {
        run_point(d, states, draws);
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) {
        failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) {
      pool.emplace_back(work);
    }
    work();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

/// p_set / p_reset of every device at every grid point. No randomness.
inline std::vector<BranchProbabilities> per_device_probability_curves(
    const CompoundSynapse& synapse, const SpikeWaveform& spike, const std::vector<double>& grid) {
  std::vector<BranchProbabilities> out;
  out.reserve(grid.size());
  for (double dt : grid) {
    out.push_back(branch_probabilities(synapse, spike, spike, dt));
  }
  return out;
}

/// Analytic P(|dg| = k), k = 0..n, per grid point for polarity-split banks:
/// SET counts for dt >= 0, RESET counts for dt < 0.
inline std::vector<std::vector<double>> state_probability_curves(const CompoundSynapse& synapse,
                                                                 const SpikeWaveform& spike,
                                                                 const std::vector<double>& grid) {
  std::vector<std::vector<double>> out;
  out.reserve(grid.size());
  for (double dt : grid) {
    const BranchProbabilities probs = branch_probabilities(synapse, spike, spike, dt);
    out.push_back(state_distribution(
        detail::switching_probabilities(probs, bank_for(dt), InitPolicy{})));
  }
  return out;
}

}  // namespace synlab
