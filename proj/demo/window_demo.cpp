// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

// Prints the analytic STDP window of the default 16-device dendritic synapse
// next to a short Monte Carlo estimate.

#include <cstdio>

#include "synlab/synlab.hpp"

int main() {
  using namespace synlab;

  const SpikeWaveform spike = make_default_waveform({});
  const CompoundSynapse synapse(make_linear_attenuators(16, 0.6, 1.0), DeviceModel{});

  StdpProtocol protocol;
  protocol.grid = {-5.0, 5.0, 0.5};
  protocol.epochs = 2000;
  protocol.seed = 7;

  const StdpWindowResult window = run_stdp_window(synapse, spike, protocol);
  std::printf("%8s %10s %10s %6s\n", "dt", "analytic", "empirical", "mode");
  for (const GridPointResult& p : window.points) {
    std::printf("%8.2f %10.4f %10.4f %6d\n", p.dt, p.analytic_mean, p.mean, p.mode);
  }

  for (const FitResult& f : fit_window(window, FitTarget::mean)) {
    std::printf("%-11s %-5s a=%9.4f b=%9.4f R2=%.5f\n", to_string(f.model).data(),
                to_string(f.side).data(), f.a, f.b, f.r_squared);
  }
  return 0;
}
