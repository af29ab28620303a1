// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdwv/error.hpp"
#include "hdwv/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string schemes;
  std::string out;
  std::string format;
  std::string tensor;
  std::vector<std::string> sets;
};

void add_experiment_options(CLI::App* sub, Options& o, bool tensor) {
  sub->add_option("--config", o.config, "key = value config file");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--trials", o.trials, "trials per scheme and grid point")->check(CLI::PositiveNumber);
  sub->add_option("--scheme", o.schemes, "comma-separated schemes (cwsc, hdpv, harp, multiread5, ...)");
  sub->add_option("--out", o.out, "output directory (default $HDWV_OUT_DIR, else ./hdwv_out)");
  sub->add_option("--format", o.format, "summary format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--set", o.sets, "extra KEY=VALUE setting, repeatable");
  if (tensor) sub->add_option("--tensor", o.tensor, "weight container to program");
}

// Config file first, then the subcommand's experiment, then flags.
hdwv::ExperimentSpec build_spec(const Options& o, std::optional<hdwv::ExperimentKind> kind) {
  hdwv::ExperimentSpec spec;
  if (!o.config.empty()) hdwv::load_config(o.config, spec);
  if (kind) spec.experiment = *kind;
  if (o.seed) spec.seed = *o.seed;
  if (o.trials) spec.trials = *o.trials;
  if (!o.schemes.empty()) hdwv::apply_setting(spec, "schemes", o.schemes);
  if (!o.format.empty()) hdwv::apply_setting(spec, "format", o.format);
  if (!o.tensor.empty()) spec.tensor = o.tensor;
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw hdwv::Error(hdwv::ErrorCode::InvalidSpec, "--set expects KEY=VALUE, got '" + kv + "'");
    hdwv::apply_setting(spec, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.out.empty()) {
    spec.out_dir = o.out;
  } else if (const char* env = std::getenv(hdwv::kOutDirEnv); env && *env) {
    spec.out_dir = env;
  } else {
    spec.out_dir = "hdwv_out";
  }
  spec.validate();
  return spec;
}

void print_summary(const hdwv::ExperimentResult& res) {
  std::printf("%-10s %8s %-12s %16s %16s %10s %12s %12s %6s\n", "grid", "value", "scheme", "rms_weight_lsb",
              "rms_cell_lsb", "iters", "latency_us", "energy_nj", "conv");
  for (const auto& r : res.rows)
    std::printf("%-10s %8.3g %-12s %8.3f +-%5.3f %8.3f +-%5.3f %10.2f %12.2f %12.3f %6.2f\n", r.grid.c_str(), r.value,
                r.scheme.c_str(), r.rms_weight.mean, r.rms_weight.std, r.rms_cell.mean, r.rms_cell.std,
                r.iterations.mean, r.latency_ns.mean * 1e-3, r.energy_pj.mean * 1e-3, r.convergence_rate);
}

int run(const Options& o, std::optional<hdwv::ExperimentKind> kind) {
  hdwv::ExperimentSpec spec;
  try {
    spec = build_spec(o, kind);
  } catch (const hdwv::Error& e) {
    std::cerr << "hdwv: " << e.what() << '\n';
    return kUsage;
  }
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = hdwv::run_experiment(spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    print_summary(res);
    std::cerr << "hdwv: wrote " << spec.out_dir.string() << " (wall time " << secs << " s)\n";
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "hdwv: experiment failed: " << e.what() << '\n';
    return kFailure;
  }
}

int selftest() {
  int failed = 0;
  for (const auto& c : hdwv::run_selftest()) {
    std::cout << (c.ok ? "ok   " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << ": " << c.detail;
    std::cout << '\n';
    failed += !c.ok;
  }
  return failed ? kFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write-and-verify simulator for multi-level RRAM columns"};
  app.set_version_flag("--version", std::string(hdwv::kVersion));
  app.require_subcommand(1);

  Options o;
  struct Sub {
    const char* name;
    const char* help;
    std::optional<hdwv::ExperimentKind> kind;
  };
  const Sub subs[] = {
      {"run", "run the experiment named in the config (default: convergence)", std::nullopt},
      {"sweep-noise", "sweep read-noise sigma", hdwv::ExperimentKind::NoiseSweep},
      {"sweep-rho", "sweep the common-mode fraction at fixed total noise", hdwv::ExperimentKind::RhoSweep},
      {"sweep-tau", "sweep the compare-only Hadamard threshold", hdwv::ExperimentKind::TauSweep},
      {"compare-averaging", "compare multi-read averaging against Hadamard verify",
       hdwv::ExperimentKind::AveragingCompare},
      {"program-tensor", "program a weight tensor and export the result", hdwv::ExperimentKind::ProgramTensor},
  };
  std::vector<std::pair<CLI::App*, std::optional<hdwv::ExperimentKind>>> commands;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_experiment_options(sub, o, s.kind == hdwv::ExperimentKind::ProgramTensor || !s.kind);
    commands.emplace_back(sub, s.kind);
  }
  auto* st = app.add_subcommand("selftest", "run the exact-invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (st->parsed()) return selftest();
  for (const auto& [sub, kind] : commands)
    if (sub->parsed()) return run(o, kind);
  return kUsage;
}
