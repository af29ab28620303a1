// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdwv/cost_model.hpp"
#include "hdwv/scheme.hpp"
#include "hdwv/wv_engine.hpp"

namespace hdwv {

inline constexpr std::string_view kVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "HDWV_OUT_DIR";

enum class ExperimentKind { Convergence, NoiseSweep, RhoSweep, TauSweep, AveragingCompare, ProgramTensor };
enum class OutputFormat { Csv, Json };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment(std::string_view name);  // throws InvalidSpec

/*!
 * Everything needed to reproduce one experiment. Outputs are a pure function
 * of this struct.
 *
 * An empty `schemes` list selects the experiment's default set. Cost
 * overrides are applied on top of the resolution-derived defaults.
 */
struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::Convergence;
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<Scheme> schemes;
  std::vector<double> noise_levels{0.0, 0.1, 0.3, 0.5, 0.7};
  std::vector<double> rho_values{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<int> tau_values{2, 4, 6};
  std::vector<int> m_values{5};
  WvConfig base{};
  std::map<std::string, double> cost_overrides;
  std::filesystem::path out_dir;  // empty: no artifacts
  OutputFormat format = OutputFormat::Csv;
  bool traces = true;
  std::filesystem::path tensor;  // ProgramTensor input; empty draws a random tensor
  int tensor_size = 1024;

  /// Scheme list actually run.
  std::vector<Scheme> effective_schemes() const;
  /// base with cost overrides folded in.
  WvConfig resolved_base() const;
  /// Throws InvalidSpec.
  void validate() const;
  /// Effective key=value settings, in schema order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Apply one key=value setting. Throws InvalidSpec on unknown keys or bad values.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);
/// Flat key=value text, '#' starts a comment. Throws InvalidSpec with the line number.
void parse_config(std::istream& is, ExperimentSpec& spec);
/// Throws InvalidSpec naming the path when it cannot be opened.
void load_config(const std::filesystem::path& path, ExperimentSpec& spec);
std::string format_config(const ExperimentSpec& spec);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for one trial
};

/// Order-independent mean and sample std.
Stat summarize(std::vector<double> xs);

/// One run_wv outcome as the harness keeps it.
struct RunRecord {
  int grid_index = 0;
  std::string scheme;
  int trial = 0;
  double rms_cell_lsb = 0.0;
  double rms_weight_lsb = 0.0;
  int iterations = 0;
  bool converged = false;
  CostLedger cost;
  std::vector<IterationRecord> trace;
};

struct SummaryRow {
  int grid_index = 0;
  std::string grid;  // swept parameter, "default" for single-point experiments
  double value = 0.0;
  std::string scheme;
  int trials = 0;
  Stat rms_cell, rms_weight, iterations, latency_ns, energy_pj;
  double convergence_rate = 0.0;
  CostLedger cost;  // summed over trials

  double adc_energy_share() const { return cost.adc_energy_pj() / cost.total_pj(); }
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  std::vector<RunRecord> runs;

  /// Row for (scheme, grid index). Throws IndexOutOfRange when absent.
  const SummaryRow& row(std::string_view scheme, int grid_index = 0) const;
  int grid_points() const;
};

/// Optional per-run progress callback (grid index, scheme, trial).
using Progress = std::function<void(int, const std::string&, int)>;

/*!
 * Run an experiment. Trial t of every scheme and grid point shares the same
 * targets, device instance and noise streams (seeded from (seed, t)), so
 * comparisons are paired. Artifacts are written when out_dir is set.
 * Throws InvalidSpec or OutputUnwritable.
 */
ExperimentResult run_experiment(const ExperimentSpec& spec, const Progress& progress = {});

/// Artifacts of a finished experiment into spec.out_dir.
void write_artifacts(const ExperimentSpec& spec, const ExperimentResult& result);
void write_summary_csv(std::ostream& os, const ExperimentResult& result);
void write_traces_csv(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result);
nlohmann::json summary_json(const ExperimentResult& result);
nlohmann::json manifest_json(const ExperimentSpec& spec);

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Exact-invariant suite: orthogonality, common-mode rejection, round-trips.
std::vector<CheckResult> run_selftest();

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace hdwv
