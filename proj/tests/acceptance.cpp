// Copyright 2026 The synlab Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles/oracles.hpp"
#include "synlab/cli.hpp"
#include "synlab/synlab.hpp"

namespace fs = std::filesystem;
using namespace synlab;

namespace {

// Pinned tolerances.
constexpr double kCdfAtThresholdTol = 1e-6;
constexpr double kCdfAt13Tol = 1e-4;
constexpr double kPmfTol = 1e-12;
constexpr double kMeanSigmas = 4.0;
constexpr double kTvdMax = 0.03;
constexpr std::size_t kMinSetLevels = 12;
constexpr double kPlateauTol = 1e-9;
constexpr double kSpreadTol = 1e-12;
constexpr double kOracleTol = 1e-9;
constexpr double kMinAsymmetry = 2.0;
constexpr double kDistinctGap = 1e-4;
constexpr double kExpParamTol = 1e-6;
constexpr double kExpR2Min = 1.0 - 1e-9;
constexpr double kLinearTol = 1e-10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what;
      pass = false;
    }
  }
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("synlab_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "synlab %s: %s", args[0].c_str(), err.str().c_str());
  return code;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
  return f;
}

// Rows of a CSV file after the header; returns false if the header differs.
bool read_csv(const fs::path& p, const std::string& header, std::vector<std::vector<std::string>>& rows) {
  std::stringstream in(read_file(p));
  std::string line;
  if (!std::getline(in, line) || line != header) return false;
  while (std::getline(in, line)) rows.push_back(split(line));
  return true;
}

const SpikeWaveform& spike() {
  static const SpikeWaveform w = make_default_waveform({});
  return w;
}

CompoundSynapse default_synapse() { return build_synapse(default_config()); }

void criterion1(Outcome& o) {
  const DeviceModel m;
  const double at_th = set_probability(m, 1.0);
  const double at_13 = set_probability(m, 1.3);
  o.detail << "p(1.0)=" << at_th << " p(1.3)=" << at_13;
  o.check(std::abs(at_th - 0.5) <= kCdfAtThresholdTol, "; p(1.0) off");
  o.check(std::abs(at_13 - 0.998650) <= kCdfAt13Tol, "; p(1.3) off");
}

void criterion2(Outcome& o) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
    std::vector<double> p(n);
    for (double& x : p) x = u(gen);
    const auto fast = state_distribution(p);
    const auto brute = oracle::enumerate_pmf(p);
    for (std::size_t k = 0; k <= n; ++k) worst = std::max(worst, std::abs(fast[k] - brute[k]));
  }
  for (double p : {0.0, 0.1, 0.5, 0.93, 1.0}) {
    const auto fast = state_distribution(std::vector<double>(16, p));
    const auto binom = oracle::binomial_pmf(16, p);
    for (std::size_t k = 0; k <= 16; ++k) worst = std::max(worst, std::abs(fast[k] - binom[k]));
  }
  o.detail << "max |diff|=" << worst;
  o.check(worst <= kPmfTol, "; exceeds tolerance");
}

void criterion3(Outcome& o) {
  RunConfig cfg = default_config();
  cfg.protocol.grid = {-5.0, 5.0, 1.0};
  const auto t0 = std::chrono::steady_clock::now();
  const StdpWindowResult r =
      run_stdp_window(build_synapse(cfg), build_waveform(cfg), cfg.protocol, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst_z = 0.0;
  double worst_tvd = 0.0;
  for (const GridPointResult& p : r.points) {
    const double se = std::sqrt(p.analytic_variance / static_cast<double>(r.epochs));
    const double dev = std::abs(p.mean - p.analytic_mean);
    worst_z = std::max(worst_z, se > 0 ? dev / se : (dev > 0 ? INFINITY : 0.0));
    worst_tvd = std::max(worst_tvd, p.tvd);
  }
  o.detail << r.points.size() << " points, max |z|=" << worst_z << " max TVD=" << worst_tvd
           << " time=" << secs << "s";
  o.check(r.points.size() == 11, "; wrong grid");
  o.check(worst_z <= kMeanSigmas, "; mean outside band");
  o.check(worst_tvd <= kTvdMax, "; TVD too large");
  o.check(secs <= 30.0, "; too slow");
}

// Samples of the default compare run, shared by criteria 4 and 8.
const fs::path& default_compare_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch("compare");
    cli_run({"compare", "--seed", "1", "--out-dir", d.string()});
    return d;
  }();
  return dir;
}

void criterion4(Outcome& o) {
  std::vector<std::vector<std::string>> rows;
  if (!read_csv(default_compare_dir() / "dendritic" / "samples.csv",
                "delta_t,epoch,delta_g,delta_g_noisy", rows)) {
    o.check(false, "samples.csv missing or malformed");
    return;
  }
  std::set<int> set_levels;
  bool in_range = true;
  for (const auto& r : rows) {
    const double dt = std::stod(r[0]);
    const int dg = std::stoi(r[2]);
    if (dt >= 0) {
      in_range = in_range && dg >= 0 && dg <= 16;
      if (dg != 0) set_levels.insert(dg);
    } else {
      in_range = in_range && dg >= -16 && dg <= 0;
    }
  }
  // Analytic prediction of the same count (levels with probability above 1e-4 somewhere).
  std::set<int> predicted;
  const auto grid = DtGrid{}.points();
  const auto pmfs = state_probability_curves(default_synapse(), spike(), grid);
  for (std::size_t d = 0; d < grid.size(); ++d) {
    if (grid[d] < 0) continue;
    for (std::size_t k = 1; k < pmfs[d].size(); ++k) {
      if (pmfs[d][k] > 1e-4) predicted.insert(static_cast<int>(k));
    }
  }
  o.detail << rows.size() << " samples, " << set_levels.size() << " distinct SET levels (analytic "
           << predicted.size() << ")";
  o.check(in_range, "; sample outside level range");
  o.check(set_levels.size() >= kMinSetLevels, "; too few levels");
}

void criterion5(Outcome& o) {
  const CompoundSynapse s = default_synapse();
  auto mean_at = [&](double dt) {
    return expected_normalized_conductance(branch_probabilities(s, spike(), spike(), dt));
  };
  const double m0 = mean_at(0.1);
  double plateau_dev = 0.0;
  for (double dt : {0.5, 0.99}) plateau_dev = std::max(plateau_dev, std::abs(mean_at(dt) - m0));
  bool decreasing = true;
  for (int i = 0; i < 8; ++i) {
    decreasing = decreasing && mean_at(1.0 + 0.5 * i) > mean_at(1.5 + 0.5 * i);
  }
  o.detail << "plateau=" << m0 << " spread=" << plateau_dev
           << (decreasing ? " strictly decreasing on [1,5]" : " not decreasing");
  o.check(plateau_dev <= kPlateauTol, "; plateau not flat");
  o.check(decreasing, "; decay not strict");
}

void criterion6(Outcome& o) {
  const CompoundSynapse s = default_synapse();
  const auto set_side = branch_probabilities(s, spike(), spike(), 2.0);
  const auto reset_side = branch_probabilities(s, spike(), spike(), -2.0);
  auto spread = [](const BranchProbabilities& b, double BranchRecord::*field) {
    double lo = INFINITY, hi = -INFINITY;
    for (const BranchRecord& r : b) {
      lo = std::min(lo, r.*field);
      hi = std::max(hi, r.*field);
    }
    return hi - lo;
  };
  const double set_spread = spread(set_side, &BranchRecord::v_set_peak);
  const double reset_spread = spread(reset_side, &BranchRecord::v_reset_peak);
  double oracle_dev = 0.0;
  const oracle::DefaultSpike ref;
  for (const BranchRecord& r : set_side) {
    oracle_dev = std::max(oracle_dev,
                          std::abs(r.v_set_peak - oracle::dense_sample_peaks(ref, r.alpha, 0, 2.0).max));
  }
  for (const BranchRecord& r : reset_side) {
    oracle_dev = std::max(
        oracle_dev, std::abs(r.v_reset_peak - oracle::dense_sample_peaks(ref, r.alpha, 0, -2.0).min));
  }
  o.detail << "SET spread=" << set_spread << " V, RESET spread=" << reset_spread
           << " V, ratio=" << set_spread / reset_spread << ", oracle dev=" << oracle_dev;
  o.check(std::abs(set_spread - 0.36) <= kSpreadTol, "; SET spread");
  o.check(std::abs(reset_spread - 0.128) <= kSpreadTol, "; RESET spread");
  o.check(set_spread / reset_spread >= kMinAsymmetry, "; ratio");
  o.check(oracle_dev <= kOracleTol, "; dense sampling disagrees");
}

void criterion7(Outcome& o) {
  const auto grid = DtGrid{}.points();
  const CompoundSynapse flat = build_synapse(flat_baseline(default_config()));
  const auto curves = per_device_probability_curves(flat, spike(), grid);
  const auto pmfs = state_probability_curves(flat, spike(), grid);
  bool identical = true;
  double binom_dev = 0.0;
  for (std::size_t d = 0; d < grid.size(); ++d) {
    for (const BranchRecord& r : curves[d]) {
      identical = identical && r.p_set == curves[d][0].p_set && r.p_reset == curves[d][0].p_reset;
    }
    const double p = grid[d] >= 0 ? curves[d][0].p_set : curves[d][0].p_reset;
    const auto binom = oracle::binomial_pmf(16, p);
    for (std::size_t k = 0; k <= 16; ++k) binom_dev = std::max(binom_dev, std::abs(pmfs[d][k] - binom[k]));
  }
  const auto dendritic = branch_probabilities(default_synapse(), spike(), spike(), 2.0);
  double min_gap = INFINITY;
  for (std::size_t i = 0; i < dendritic.size(); ++i) {
    for (std::size_t j = i + 1; j < dendritic.size(); ++j) {
      min_gap = std::min(min_gap, std::abs(dendritic[i].p_set - dendritic[j].p_set));
    }
  }
  o.detail << "flat curves " << (identical ? "identical" : "differ") << ", binomial dev="
           << binom_dev << ", dendritic min gap at dt=2: " << min_gap;
  o.check(identical, "; flat curves differ");
  o.check(binom_dev <= kPmfTol, "; flat PMF not binomial");
  o.check(min_gap >= kDistinctGap, "; dendritic p_set not distinct");
}

void criterion8(Outcome& o) {
  std::vector<FitPoint> exp_pts;
  for (int i = 0; i <= 40; ++i) {
    const double x = 1.0 + 0.1 * i;
    exp_pts.push_back({x, 3.0 * std::exp(-0.8 * x)});
  }
  const FitResult e = fit_exponential(exp_pts);
  const double rel_a = std::abs(e.a - 3.0) / 3.0;
  const double rel_b = std::abs(e.b + 0.8) / 0.8;

  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double lin_dev = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FitPoint> pts;
    std::vector<double> x, y;
    for (int i = 0; i < 41; ++i) {
      pts.push_back({u(gen), u(gen)});
      x.push_back(pts.back().x);
      y.push_back(pts.back().y);
    }
    const auto [a, b] = oracle::normal_equation_line(x, y);
    const FitResult f = fit_linear(pts);
    lin_dev = std::max({lin_dev, std::abs(f.a - a), std::abs(f.b - b)});
  }

  std::size_t converged = 0, total = 0;
  std::ostringstream ranking;
  try {
    const json c = json::parse(read_file(default_compare_dir() / "comparison.json"));
    for (const char* mode : {"dendritic", "flat"}) {
      for (const json& f : c[mode]["fits"]) {
        ++total;
        converged += f["converged"].get<bool>() ? 1 : 0;
      }
      const json& r2 = c[mode]["r_squared"];
      ranking << ' ' << mode << " R2 set exp/lin=" << r2["set"]["exponential"] << '/'
              << r2["set"]["linear"];
    }
  } catch (const std::exception& ex) {
    o.check(false, std::string("comparison.json: ") + ex.what());
  }
  o.detail << "exp rel err a=" << rel_a << " b=" << rel_b << " R2=" << e.r_squared
           << ", linear dev=" << lin_dev << ", compare fits converged " << converged << '/'
           << total << ";" << ranking.str();
  o.check(rel_a <= kExpParamTol && rel_b <= kExpParamTol, "; exp params");
  o.check(e.r_squared >= kExpR2Min, "; exp R2");
  o.check(lin_dev <= kLinearTol, "; linear fit");
  o.check(total == 8 && converged == total, "; compare fits");
}

void criterion9(Outcome& o) {
  const fs::path base = scratch("determinism");
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "2", "8", "8"}) {
    const fs::path dir = base / ("t" + std::to_string(outputs.size()));
    if (cli_run({"stdp-window", "--seed", "42", "--threads", threads, "--out-dir", dir.string()}) !=
        0) {
      o.check(false, "run failed");
      return;
    }
    outputs.push_back(read_file(dir / "samples.csv"));
  }
  bool same = true;
  for (const std::string& s : outputs) same = same && s == outputs[0];
  o.detail << outputs.size() << " runs (1, 2, 8, 8 threads), samples.csv " << outputs[0].size()
           << " bytes, " << (same ? "byte-identical" : "differ");
  o.check(same, "");
  fs::remove_all(base);
}

void criterion10(Outcome& o) {
  const fs::path dir = scratch("figure");
  if (cli_run({"compare", "--figure-mode", "--out-dir", dir.string()}) != 0) {
    o.check(false, "compare failed");
    return;
  }
  for (const char* mode : {"dendritic", "flat"}) {
    const fs::path m = dir / mode;
    const std::string svg = fs::exists(m / "window.svg") ? read_file(m / "window.svg") : "";
    std::size_t circles = 0;
    for (auto p = svg.find("class=\"sample\""); p != std::string::npos;
         p = svg.find("class=\"sample\"", p + 1)) {
      ++circles;
    }
    const bool svg_ok = svg.find("<svg") != std::string::npos &&
                        svg.find("</svg>") != std::string::npos &&
                        svg.find("class=\"fit ") != std::string::npos && circles > 0;

    std::vector<std::vector<std::string>> samples, curves, states;
    const bool schema =
        read_csv(m / "samples.csv", "delta_t,epoch,delta_g,delta_g_noisy", samples) &&
        read_csv(m / "curves.csv",
                 "delta_t,device_index,alpha,v_set_peak,v_reset_peak,p_set,p_reset", curves) &&
        read_csv(m / "states.csv", "delta_t,g,probability", states) &&
        curves.size() == 101 * 16 && states.size() == 101 * 17;
    std::set<int> levels;
    bool pos = false, neg = false;
    for (const auto& r : samples) {
      const double dt = std::stod(r[0]);
      const int dg = std::stoi(r[2]);
      levels.insert(dg);
      pos = pos || (dt > 0 && std::stod(r[3]) != 0 && dg > 0);
      neg = neg || (dt < 0 && std::stod(r[3]) != 0 && dg < 0);
    }
    o.detail << mode << ": " << circles << " density cells, " << levels.size() << " levels; ";
    o.check(svg_ok, std::string("; ") + mode + " svg");
    o.check(schema, std::string("; ") + mode + " schema");
    o.check(pos && neg, std::string("; ") + mode + " degenerate");
  }
  fs::remove_all(dir);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"CDF accuracy", criterion1},
      {"Poisson-binomial exactness", criterion2},
      {"Monte Carlo vs analytic agreement", criterion3},
      {"Level count", criterion4},
      {"Plateau and decay", criterion5},
      {"SET/RESET peak asymmetry", criterion6},
      {"Dendritic vs flat discriminator", criterion7},
      {"Fit machinery", criterion8},
      {"Determinism across threads", criterion9},
      {"Figure products", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("; exception: ") + e.what());
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  fs::remove_all(fs::temp_directory_path() / "synlab_acceptance_compare");
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
