// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "synlab/device.hpp"
#include "synlab/errors.hpp"
#include "synlab/waveform.hpp"

namespace synlab {

struct DendriticBranch {
  double alpha = 1.0;  // attenuation in (0, 1]
  double delay = 0.0;  // time units
};

/// n branches with attenuations spread evenly over [alpha_min, alpha_max].
inline std::vector<DendriticBranch> make_linear_attenuators(std::size_t n, double alpha_min,
                                                            double alpha_max) {
  detail::require(n >= 1, "synapse.n must be >= 1");
  detail::require(alpha_min > 0.0 && alpha_min <= alpha_max && alpha_max <= 1.0,
                  "attenuation range must satisfy 0 < alpha_min <= alpha_max <= 1");
  std::vector<DendriticBranch> out(n);
  if (n == 1) {
    out[0].alpha = alpha_min;
    return out;
  }
  const double span = alpha_max - alpha_min;
  for (std::size_t i = 0; i < n; ++i) {
    out[i].alpha = alpha_min + span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back().alpha = alpha_max;
  return out;
}

/// n bistable devices in parallel, each behind its own dendritic branch.
class CompoundSynapse {
 public:
  CompoundSynapse(std::vector<DendriticBranch> branches, DeviceModel model,
                  AttenuatedSide side = AttenuatedSide::pre)
      : branches_(std::move(branches)),
        model_(model),
        states_(branches_.size(), DeviceState::off),
        side_(side) {
    detail::require(!branches_.empty(), "compound synapse needs at least one branch");
    for (const DendriticBranch& b : branches_) {
      detail::require(b.alpha > 0.0 && b.alpha <= 1.0, "branch alpha must lie in (0, 1]");
      detail::require(std::isfinite(b.delay), "branch delay must be finite");
    }
    model_.validate();
  }

  std::size_t size() const { return branches_.size(); }
  std::span<const DendriticBranch> branches() const { return branches_; }
  const DeviceModel& device_model() const { return model_; }
  AttenuatedSide attenuated_side() const { return side_; }

  std::span<const DeviceState> states() const { return states_; }
  void set_states(std::vector<DeviceState> states) {
    detail::require(states.size() == branches_.size(), "state vector length must equal n");
    states_ = std::move(states);
  }
  void fill_states(DeviceState s) { states_.assign(branches_.size(), s); }

 private:
  std::vector<DendriticBranch> branches_;
  DeviceModel model_;
  std::vector<DeviceState> states_;
  AttenuatedSide side_;
};

struct BranchRecord {
  std::size_t index = 0;
  double alpha = 1.0;
  double v_set_peak = 0.0;
  double v_reset_peak = 0.0;
  double p_set = 0.0;
  double p_reset = 0.0;
};

using BranchProbabilities = std::vector<BranchRecord>;

inline BranchProbabilities branch_probabilities(const CompoundSynapse& s, const SpikeWaveform& pre,
                                                const SpikeWaveform& post, double dt) {
  BranchProbabilities out(s.size());
  const auto branches = s.branches();
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const NetPeaks peaks =
        net_peaks(pre, post, branches[i].alpha, branches[i].delay, dt, s.attenuated_side());
    out[i] = {i,
              branches[i].alpha,
              peaks.v_set_peak,
              peaks.v_reset_peak,
              set_probability(s.device_model(), peaks.v_set_peak),
              reset_probability(s.device_model(), peaks.v_reset_peak)};
  }
  return out;
}

enum class Polarity { set_from_all_off, reset_from_all_on };
enum class OffConductance { include, neglect };

/// Mean conductance of the compound synapse after one spike pair applied to
/// a uniform starting bank (all OFF for SET, all ON for RESET).
inline double expected_conductance(const CompoundSynapse& s, const BranchProbabilities& probs,
                                   Polarity polarity,
                                   OffConductance off = OffConductance::include) {
  const DeviceModel& m = s.device_model();
  const double g_on = 1.0 / m.r_on;
  const double g_off = off == OffConductance::include ? 1.0 / m.r_off : 0.0;
  double g = 0.0;
  for (const BranchRecord& r : probs) {
    const double p_on = polarity == Polarity::set_from_all_off ? r.p_set : 1.0 - r.p_reset;
    g += p_on * g_on + (1.0 - p_on) * g_off;
  }
  return g;
}

/// Expected count of devices that SET, i.e. the mean conductance with r_on
/// normalized to 1 and the OFF conductance dropped.
inline double expected_normalized_conductance(const BranchProbabilities& probs) {
  double sum = 0.0;
  for (const BranchRecord& r : probs) {
    sum += r.p_set;
  }
  return sum;
}

/// Exact distribution of the number of successes among independent
/// Bernoulli trials with the given probabilities (Poisson-binomial law).
/// pmf[k] = P(k successes), k = 0..n.
inline std::vector<double> state_distribution(std::span<const double> p) {
  std::vector<double> pmf(p.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = p[i];
    detail::require(q >= 0.0 && q <= 1.0, "probabilities must lie in [0, 1]");
    // in place, highest count first
    for (std::size_t k = i + 1; k > 0; --k) {
      pmf[k] = pmf[k] * (1.0 - q) + pmf[k - 1] * q;
    }
    pmf[0] *= 1.0 - q;
  }
  return pmf;
}

struct TransitionCounts {
  std::size_t set_count = 0;
  std::size_t reset_count = 0;
};

/// Applies one spike pair to `states` in place; draw i decides device i.
inline TransitionCounts apply_spike_pair(std::span<DeviceState> states,
                                         const BranchProbabilities& probs,
                                         std::span<const double> draws) {
  detail::require(states.size() == probs.size() && draws.size() == probs.size(),
                  "apply_spike_pair needs one record and one draw per device");
  TransitionCounts counts;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const DeviceState before = states[i];
    states[i] = sample_transition(before, probs[i].p_set, probs[i].p_reset, draws[i]);
    if (before == DeviceState::off && states[i] == DeviceState::on) {
      ++counts.set_count;
    } else if (before == DeviceState::on && states[i] == DeviceState::off) {
      ++counts.reset_count;
    }
  }
  return counts;
}

struct SpikePairOutcome {
  std::vector<DeviceState> states;
  std::size_t set_count = 0;
  std::size_t reset_count = 0;
};

inline SpikePairOutcome apply_spike_pair(const CompoundSynapse& s,
                                         const BranchProbabilities& probs,
                                         std::span<const double> draws) {
  SpikePairOutcome out;
  out.states.assign(s.states().begin(), s.states().end());
  const TransitionCounts counts = apply_spike_pair(std::span<DeviceState>(out.states), probs, draws);
  out.set_count = counts.set_count;
  out.reset_count = counts.reset_count;
  return out;
}

}  // namespace synlab
