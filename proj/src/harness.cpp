// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "hdwv/error.hpp"
#include "hdwv/hadamard.hpp"
#include "hdwv/rng.hpp"
#include "hdwv/weight_io.hpp"
#include "hdwv/weight_mapper.hpp"

namespace hdwv {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

constexpr std::string_view kExperimentNames[] = {"convergence", "noise-sweep", "rho-sweep",
                                                 "tau-sweep",   "compare-averaging", "program-tensor"};

std::string lower_trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidSpec, "bad value for '" + std::string(key) + "': '" + std::string(value) + "'");
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T v{};
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) bad_value(key, text);
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string t = lower_trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, text);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

std::string scheme_list(const std::vector<Scheme>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + to_string(xs[i]);
  return out;
}

struct Key {
  std::string_view name;
  std::function<void(ExperimentSpec&, std::string_view)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

#define HDWV_NUM_KEY(NAME, TYPE, FIELD)                                                           \
  Key {                                                                                           \
    NAME, [](ExperimentSpec& s, std::string_view v) { s.FIELD = parse_number<TYPE>(NAME, v); },   \
        [](const ExperimentSpec& s) {                                                             \
          if constexpr (std::is_floating_point_v<TYPE>)                                           \
            return format_double(s.FIELD);                                                        \
          else                                                                                    \
            return std::to_string(s.FIELD);                                                       \
        }                                                                                         \
  }

double* cost_field(CostParams& p, std::string_view name) {
  if (name == "read_pulse_ns") return &p.read_pulse_ns;
  if (name == "sar_latency_ns") return &p.sar_latency_ns;
  if (name == "compare_latency_ns") return &p.compare_latency_ns;
  if (name == "tia_energy_pj") return &p.tia_energy_pj;
  if (name == "sar_energy_pj") return &p.sar_energy_pj;
  if (name == "compare_energy_pj") return &p.compare_energy_pj;
  if (name == "write_pulse_ns") return &p.write_pulse_ns;
  if (name == "write_pulse_energy_pj") return &p.write_pulse_energy_pj;
  if (name == "ih_decode_latency_ns") return &p.ih_decode_latency_ns;
  if (name == "ih_decode_energy_hdpv_pj") return &p.ih_decode_energy_hdpv_pj;
  if (name == "ih_decode_energy_harp_pj") return &p.ih_decode_energy_harp_pj;
  return nullptr;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"experiment", [](ExperimentSpec& s, std::string_view v) { s.experiment = parse_experiment(v); },
       [](const ExperimentSpec& s) { return std::string(to_string(s.experiment)); }},
      HDWV_NUM_KEY("trials", int, trials),
      HDWV_NUM_KEY("seed", std::uint64_t, seed),
      {"schemes",
       [](ExperimentSpec& s, std::string_view v) {
         s.schemes.clear();
         for (const auto& item : split_list(v)) {
           try {
             s.schemes.push_back(parse_scheme(item));
           } catch (const Error&) {
             bad_value("schemes", v);
           }
         }
       },
       [](const ExperimentSpec& s) { return scheme_list(s.effective_schemes()); }},
      {"noise_levels", [](ExperimentSpec& s, std::string_view v) { s.noise_levels = parse_list<double>("noise_levels", v); },
       [](const ExperimentSpec& s) { return join(s.noise_levels); }},
      {"rho_values", [](ExperimentSpec& s, std::string_view v) { s.rho_values = parse_list<double>("rho_values", v); },
       [](const ExperimentSpec& s) { return join(s.rho_values); }},
      {"tau_values", [](ExperimentSpec& s, std::string_view v) { s.tau_values = parse_list<int>("tau_values", v); },
       [](const ExperimentSpec& s) { return join(s.tau_values); }},
      {"m_values", [](ExperimentSpec& s, std::string_view v) { s.m_values = parse_list<int>("m_values", v); },
       [](const ExperimentSpec& s) { return join(s.m_values); }},
      {"format",
       [](ExperimentSpec& s, std::string_view v) {
         const auto t = lower_trim(v);
         if (t == "csv")
           s.format = OutputFormat::Csv;
         else if (t == "json")
           s.format = OutputFormat::Json;
         else
           bad_value("format", v);
       },
       [](const ExperimentSpec& s) { return std::string(s.format == OutputFormat::Json ? "json" : "csv"); }},
      {"traces", [](ExperimentSpec& s, std::string_view v) { s.traces = parse_bool("traces", v); },
       [](const ExperimentSpec& s) { return std::string(s.traces ? "true" : "false"); }},
      {"tensor", [](ExperimentSpec& s, std::string_view v) { s.tensor = trim(v); },
       [](const ExperimentSpec& s) { return s.tensor.string(); }},
      HDWV_NUM_KEY("tensor_size", int, tensor_size),
      HDWV_NUM_KEY("n", int, base.n),
      HDWV_NUM_KEY("b", int, base.b),
      {"b_c",
       [](ExperimentSpec& s, std::string_view v) {
         s.base.b_c = parse_number<int>("b_c", v);
         s.base.device.bits_per_cell = s.base.b_c;
       },
       [](const ExperimentSpec& s) { return std::to_string(s.base.b_c); }},
      HDWV_NUM_KEY("k_streak", int, base.k_streak),
      HDWV_NUM_KEY("tau_w", int, base.tau_w),
      HDWV_NUM_KEY("decision_threshold_lsb", double, base.decision_threshold_lsb),
      HDWV_NUM_KEY("max_fine_iters", int, base.max_fine_iters),
      HDWV_NUM_KEY("max_coarse_iters", int, base.max_coarse_iters),
      HDWV_NUM_KEY("max_pulses_per_iter", int, base.max_pulses_per_iter),
      HDWV_NUM_KEY("sigma_lsb", double, base.noise.sigma_total_lsb),
      HDWV_NUM_KEY("rho", double, base.noise.rho),
      {"cm_mode",
       [](ExperimentSpec& s, std::string_view v) {
         const auto t = lower_trim(v);
         if (t == "per_sweep")
           s.base.noise.cm_mode = CommonModeMode::PerSweep;
         else if (t == "per_column_static")
           s.base.noise.cm_mode = CommonModeMode::PerColumnStatic;
         else
           bad_value("cm_mode", v);
       },
       [](const ExperimentSpec& s) {
         return std::string(s.base.noise.cm_mode == CommonModeMode::PerSweep ? "per_sweep" : "per_column_static");
       }},
      HDWV_NUM_KEY("adc_bits", int, base.adc_bits),
      HDWV_NUM_KEY("g_min", double, base.device.g_min),
      HDWV_NUM_KEY("g_max", double, base.device.g_max),
      HDWV_NUM_KEY("fine_step_lsb", double, base.device.fine_step_lsb),
      HDWV_NUM_KEY("coarse_steps_per_pulse", int, base.device.coarse_steps_per_pulse),
      HDWV_NUM_KEY("sigma_map_rel", double, base.device.sigma_map_rel),
      HDWV_NUM_KEY("d2d_sigma_rel", double, base.device.d2d_sigma_rel),
      HDWV_NUM_KEY("c2c_sigma_rel", double, base.device.c2c_sigma_rel),
      HDWV_NUM_KEY("nonlinearity", double, base.device.nonlinearity),
  };
  return table;
}

#undef HDWV_NUM_KEY

}  // namespace

std::string_view to_string(ExperimentKind kind) { return kExperimentNames[static_cast<int>(kind)]; }

ExperimentKind parse_experiment(std::string_view name) {
  std::string t = lower_trim(name);
  std::replace(t.begin(), t.end(), '_', '-');
  for (int i = 0; i < 6; ++i)
    if (t == kExperimentNames[i]) return static_cast<ExperimentKind>(i);
  throw Error(ErrorCode::InvalidSpec, "unknown experiment '" + std::string(name) + "'");
}

std::vector<Scheme> ExperimentSpec::effective_schemes() const {
  std::vector<Scheme> out = schemes;
  if (out.empty()) {
    if (experiment == ExperimentKind::TauSweep)
      out = {Scheme::harp()};
    else
      out = {Scheme::cwsc(), Scheme::hdpv(), Scheme::harp()};
  }
  if (experiment == ExperimentKind::AveragingCompare)
    for (int m : m_values)
      if (std::find(out.begin(), out.end(), Scheme::multiread(m)) == out.end()) out.push_back(Scheme::multiread(m));
  return out;
}

WvConfig ExperimentSpec::resolved_base() const {
  WvConfig cfg = base;
  if (!cost_overrides.empty()) {
    CostParams p = CostParams::for_resolution(cfg.resolution());
    for (const auto& [k, v] : cost_overrides) *cost_field(p, k) = v;
    cfg.cost = p;
  }
  return cfg;
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidSpec, m); };
  if (trials < 1) fail("trials must be >= 1");
  if (effective_schemes().empty()) fail("no schemes selected");
  if (experiment == ExperimentKind::NoiseSweep && noise_levels.empty()) fail("noise_levels is empty");
  if (experiment == ExperimentKind::RhoSweep && rho_values.empty()) fail("rho_values is empty");
  if (experiment == ExperimentKind::TauSweep && tau_values.empty()) fail("tau_values is empty");
  if (experiment == ExperimentKind::AveragingCompare && m_values.empty()) fail("m_values is empty");
  for (double s : noise_levels)
    if (!(s >= 0.0)) fail("noise levels must be >= 0");
  for (double r : rho_values)
    if (!(r >= 0.0 && r <= 1.0)) fail("rho values must lie in [0, 1]");
  for (int t : tau_values)
    if (t < 0) fail("tau values must be >= 0");
  for (int m : m_values)
    if (m < 1) fail("M values must be >= 1");
  if (experiment == ExperimentKind::ProgramTensor && tensor.empty() && tensor_size < 1)
    fail("tensor_size must be >= 1");
  for (const auto& [k, v] : cost_overrides)
    if (!(v >= 0.0)) fail("cost override " + k + " must be >= 0");
  try {
    const WvConfig cfg = resolved_base();
    for (const auto& s : effective_schemes()) {
      WvConfig c = cfg;
      c.scheme = s;
      c.validate();
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidSpec) throw;
    fail(e.what());
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentSpec::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(*this));
  for (const auto& [k, v] : cost_overrides) out.emplace_back("cost." + k, format_double(v));
  return out;
}

void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  const std::string k = lower_trim(key);
  if (k.rfind("cost.", 0) == 0) {
    const std::string field = k.substr(5);
    CostParams probe;
    if (!cost_field(probe, field)) throw Error(ErrorCode::InvalidSpec, "unknown key '" + k + "'");
    spec.cost_overrides[field] = parse_number<double>(k, value);
    return;
  }
  for (const auto& entry : keys())
    if (entry.name == k) return entry.set(spec, value);
  throw Error(ErrorCode::InvalidSpec, "unknown key '" + k + "'");
}

void parse_config(std::istream& is, ExperimentSpec& spec) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(spec, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config(const std::filesystem::path& path, ExperimentSpec& spec) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidSpec, "cannot open config file " + path.string());
  parse_config(is, spec);
}

std::string format_config(const ExperimentSpec& spec) {
  std::string out;
  for (const auto& [k, v] : spec.entries()) out += k + " = " + v + "\n";
  return out;
}

Stat summarize(std::vector<double> xs) {
  Stat s;
  if (xs.empty()) return s;
  // Sorting first makes the floating-point sums independent of trial order.
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    std::vector<double> sq;
    sq.reserve(xs.size());
    for (double x : xs) sq.push_back((x - s.mean) * (x - s.mean));
    std::sort(sq.begin(), sq.end());
    s.std = std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / (n - 1.0));
  }
  return s;
}

const SummaryRow& ExperimentResult::row(std::string_view scheme, int grid_index) const {
  for (const auto& r : rows)
    if (r.grid_index == grid_index && r.scheme == scheme) return r;
  throw Error(ErrorCode::IndexOutOfRange, "no summary row for " + std::string(scheme));
}

int ExperimentResult::grid_points() const {
  int g = 0;
  for (const auto& r : rows) g = std::max(g, r.grid_index + 1);
  return g;
}

namespace {

struct GridPoint {
  std::string name;
  double value = 0.0;
  WvConfig cfg;
};

std::vector<GridPoint> grid_for(const ExperimentSpec& spec) {
  const WvConfig base = spec.resolved_base();
  std::vector<GridPoint> out;
  switch (spec.experiment) {
    case ExperimentKind::NoiseSweep:
      for (double s : spec.noise_levels) {
        out.push_back({"sigma_lsb", s, base});
        out.back().cfg.noise.sigma_total_lsb = s;
      }
      break;
    case ExperimentKind::RhoSweep:
      for (double r : spec.rho_values) {
        out.push_back({"rho", r, base});
        out.back().cfg.noise.rho = r;
      }
      break;
    case ExperimentKind::TauSweep:
      for (int t : spec.tau_values) {
        out.push_back({"tau_w", static_cast<double>(t), base});
        out.back().cfg.tau_w = t;
      }
      break;
    default:
      out.push_back({"default", 0.0, base});
  }
  return out;
}

Eigen::VectorXi trial_targets(const ExperimentSpec& spec, int trial) {
  Engine rng = make_engine(spec.seed, {stream::kTargets, static_cast<std::uint64_t>(trial)});
  const int m = spec.base.max_code();
  std::uniform_int_distribution<int> dist(-m, m);
  Eigen::VectorXi codes(spec.base.n);
  for (auto& c : codes) c = dist(rng);
  return codes;
}

WeightTensor tensor_input(const ExperimentSpec& spec) {
  if (!spec.tensor.empty()) return load_weights(spec.tensor).tensor;
  Engine rng = make_engine(spec.seed, {stream::kTargets, 0x7E45});
  std::normal_distribution<double> dist(0.0, 1.0);
  WeightTensor t;
  t.shape = {spec.tensor_size};
  t.values.resize(spec.tensor_size);
  for (auto& v : t.values) v = dist(rng);
  return t;
}

RunRecord record_from(const WvResult& r) {
  RunRecord rec;
  rec.rms_cell_lsb = r.rms_cell_lsb;
  rec.rms_weight_lsb = r.rms_weight_lsb;
  rec.iterations = r.iterations_used;
  rec.converged = r.converged;
  rec.cost = r.cost;
  rec.trace = r.trace;
  return rec;
}

// Program a whole tensor and reduce it to one record over the real weights.
RunRecord program_record(const WeightTensor& tensor, const WvConfig& cfg, ProgramResult* keep) {
  ProgramResult p = program_tensor(tensor, cfg);
  RunRecord rec;
  rec.cost = p.cost;
  double sw = 0.0, sc = 0.0;
  int iters = 0;
  bool conv = true;
  const auto count = p.mapping.codes.size();
  for (Eigen::Index i = 0; i < count; ++i) {
    const CellSlot s = p.mapping.slot(i);
    const WvResult& col = p.columns[s.group];
    sw += col.weight_error_lsb[s.row] * col.weight_error_lsb[s.row];
    sc += col.cell_error_lsb.row(s.row).squaredNorm();
  }
  for (const auto& col : p.columns) {
    iters = std::max(iters, col.iterations_used);
    conv = conv && col.converged;
  }
  rec.rms_weight_lsb = std::sqrt(sw / static_cast<double>(count));
  rec.rms_cell_lsb = std::sqrt(sc / static_cast<double>(count * p.mapping.slices()));
  rec.iterations = iters;
  rec.converged = conv;
  if (keep) *keep = std::move(p);
  return rec;
}

void export_programmed(const ExperimentSpec& spec, const std::string& scheme, const ProgramResult& p,
                       const WvConfig& cfg) {
  WeightFile f;
  f.tensor = readback_effective(p.arrays, p.mapping);
  f.b = p.mapping.b;
  f.scale = p.mapping.scale;
  f.seed = spec.seed;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : p.columns) cols.push_back(c.rms_weight_lsb);
  f.provenance = {{"scheme", scheme},
                  {"sigma_lsb", cfg.noise.sigma_total_lsb},
                  {"rho", cfg.noise.rho},
                  {"sigma_map_rel", cfg.device.sigma_map_rel},
                  {"column_rms_weight_lsb", cols}};
  save_weights(spec.out_dir / ("programmed_" + scheme + ".txt"), f);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const Progress& progress) {
  spec.validate();
  const auto schemes = spec.effective_schemes();
  const auto grid = grid_for(spec);
  const bool tensor_mode = spec.experiment == ExperimentKind::ProgramTensor;
  WeightTensor tensor;
  if (tensor_mode) {
    tensor = tensor_input(spec);
    if (tensor.values.size() == 0) throw Error(ErrorCode::InvalidSpec, "tensor is empty");
  }
  if (!spec.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    if (ec) throw Error(ErrorCode::OutputUnwritable, "cannot create " + spec.out_dir.string() + ": " + ec.message());
  }

  ExperimentResult res;
  for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
    for (const auto& scheme : schemes) {
      WvConfig cfg = grid[g].cfg;
      cfg.scheme = scheme;
      const std::string name = to_string(scheme);
      for (int t = 0; t < spec.trials; ++t) {
        if (progress) progress(g, name, t);
        const std::uint64_t trial_seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(t)});
        cfg.seed = trial_seed;
        RunRecord rec;
        if (tensor_mode) {
          ProgramResult kept;
          const bool export_now = t == 0 && !spec.out_dir.empty();
          rec = program_record(tensor, cfg, export_now ? &kept : nullptr);
          if (export_now) export_programmed(spec, name, kept, cfg);
        } else {
          CellArray group(cfg.n, 2 * cfg.slices(), cfg.device, trial_seed);
          rec = record_from(run_wv(group, trial_targets(spec, t), cfg));
        }
        rec.grid_index = g;
        rec.scheme = name;
        rec.trial = t;
        res.runs.push_back(std::move(rec));
      }
    }
  }

  for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
    for (const auto& scheme : schemes) {
      SummaryRow row;
      row.grid_index = g;
      row.grid = grid[g].name;
      row.value = grid[g].value;
      row.scheme = to_string(scheme);
      std::vector<double> rc, rw, it, ns, pj;
      int conv = 0;
      row.cost = CostLedger(grid[g].cfg.cost_params());
      for (const auto& r : res.runs) {
        if (r.grid_index != g || r.scheme != row.scheme) continue;
        rc.push_back(r.rms_cell_lsb);
        rw.push_back(r.rms_weight_lsb);
        it.push_back(r.iterations);
        ns.push_back(r.cost.total_ns());
        pj.push_back(r.cost.total_pj());
        conv += r.converged;
        row.cost += r.cost;
      }
      row.trials = static_cast<int>(rc.size());
      row.rms_cell = summarize(rc);
      row.rms_weight = summarize(rw);
      row.iterations = summarize(it);
      row.latency_ns = summarize(ns);
      row.energy_pj = summarize(pj);
      row.convergence_rate = static_cast<double>(conv) / row.trials;
      res.rows.push_back(std::move(row));
    }
  }

  if (!spec.out_dir.empty()) write_artifacts(spec, res);
  return res;
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  os << "grid,value,scheme,trials,rms_cell_mean,rms_cell_std,rms_weight_mean,rms_weight_std,"
        "iterations_mean,iterations_std,latency_ns_mean,latency_ns_std,energy_pj_mean,energy_pj_std,"
        "convergence_rate,read_patterns,sar_convert,compare_1,compare_2,decode_hdpv,decode_harp,"
        "write_phases,write_pulses,adc_energy_share\n";
  for (const auto& r : result.rows) {
    const auto& w = r.cost.tally(EventKind::WritePhase);
    os << r.grid << ',' << format_double(r.value) << ',' << r.scheme << ',' << r.trials;
    for (const Stat* s : {&r.rms_cell, &r.rms_weight, &r.iterations, &r.latency_ns, &r.energy_pj})
      os << ',' << format_double(s->mean) << ',' << format_double(s->std);
    os << ',' << format_double(r.convergence_rate) << ',' << r.cost.read_patterns() << ','
       << r.cost.tally(EventKind::SarConvert).events << ',' << r.cost.compare_events_with(1) << ','
       << r.cost.compare_events_with(2) << ',' << r.cost.decode_events(DecodeClass::HdPv) << ','
       << r.cost.decode_events(DecodeClass::Harp) << ',' << w.events << ',' << w.units << ','
       << format_double(r.adc_energy_share()) << '\n';
  }
}

void write_traces_csv(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& result) {
  const auto grid = grid_for(spec);
  os << "grid,value,scheme,trial,iteration,mean_abs_cell_error_lsb,frozen_cells,cumulative_ns,cumulative_pj\n";
  for (const auto& r : result.runs)
    for (const auto& t : r.trace)
      os << grid[r.grid_index].name << ',' << format_double(grid[r.grid_index].value) << ',' << r.scheme << ','
         << r.trial << ',' << t.iteration << ',' << format_double(t.mean_abs_cell_error_lsb) << ','
         << t.frozen_cells << ',' << format_double(t.cumulative_ns) << ',' << format_double(t.cumulative_pj) << '\n';
}

nlohmann::json summary_json(const ExperimentResult& result) {
  auto stat = [](const Stat& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"grid", r.grid},
                    {"value", r.value},
                    {"scheme", r.scheme},
                    {"trials", r.trials},
                    {"rms_cell_lsb", stat(r.rms_cell)},
                    {"rms_weight_lsb", stat(r.rms_weight)},
                    {"iterations", stat(r.iterations)},
                    {"latency_ns", stat(r.latency_ns)},
                    {"energy_pj", stat(r.energy_pj)},
                    {"convergence_rate", r.convergence_rate},
                    {"adc_energy_share", r.adc_energy_share()},
                    {"events", r.cost.summary_json()}});
  return {{"rows", rows}};
}

nlohmann::json manifest_json(const ExperimentSpec& spec) {
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : spec.entries()) cfg[k] = v;
  const CostParams p = spec.resolved_base().cost_params();
  nlohmann::json trial_seeds = nlohmann::json::array();
  for (int t = 0; t < spec.trials; ++t) trial_seeds.push_back(derive_seed(spec.seed, {static_cast<std::uint64_t>(t)}));
  nlohmann::json outputs = {"summary.csv", "manifest.json"};
  if (spec.traces && spec.experiment != ExperimentKind::ProgramTensor) outputs.push_back("traces.csv");
  if (spec.format == OutputFormat::Json) outputs.push_back("summary.json");
  if (spec.experiment == ExperimentKind::ProgramTensor)
    for (const auto& s : spec.effective_schemes()) outputs.push_back("programmed_" + to_string(s) + ".txt");
  return {{"tool", "hdwv"},
          {"version", std::string(kVersion)},
          {"experiment", std::string(to_string(spec.experiment))},
          {"master_seed", spec.seed},
          {"trial_seeds", trial_seeds},
          {"statistics", "mean and sample standard deviation over trials"},
          {"adc_bits", spec.base.resolution()},
          {"config", cfg},
          {"cost_params",
           {{"read_pulse_ns", p.read_pulse_ns},
            {"sar_latency_ns", p.sar_latency_ns},
            {"compare_latency_ns", p.compare_latency_ns},
            {"tia_energy_pj", p.tia_energy_pj},
            {"sar_energy_pj", p.sar_energy_pj},
            {"compare_energy_pj", p.compare_energy_pj},
            {"write_pulse_ns", p.write_pulse_ns},
            {"write_pulse_energy_pj", p.write_pulse_energy_pj},
            {"ih_decode_latency_ns", p.ih_decode_latency_ns},
            {"ih_decode_energy_hdpv_pj", p.ih_decode_energy_hdpv_pj},
            {"ih_decode_energy_harp_pj", p.ih_decode_energy_harp_pj}}},
          {"outputs", outputs}};
}

void write_artifacts(const ExperimentSpec& spec, const ExperimentResult& result) {
  auto open = [&](const std::string& name) {
    std::ofstream os(spec.out_dir / name, std::ios::binary);
    if (!os) throw Error(ErrorCode::OutputUnwritable, "cannot write " + (spec.out_dir / name).string());
    return os;
  };
  {
    auto os = open("summary.csv");
    write_summary_csv(os, result);
  }
  if (spec.traces && spec.experiment != ExperimentKind::ProgramTensor) {
    auto os = open("traces.csv");
    write_traces_csv(os, spec, result);
  }
  if (spec.format == OutputFormat::Json) {
    auto os = open("summary.json");
    os << summary_json(result).dump(2) << '\n';
  }
  auto os = open("manifest.json");
  os << manifest_json(spec).dump(2) << '\n';
  if (!os.flush()) throw Error(ErrorCode::OutputUnwritable, "write failed in " + spec.out_dir.string());
}

std::vector<CheckResult> run_selftest() {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, auto&& body) {
    CheckResult c{std::move(name), false, {}};
    try {
      c.ok = body(c.detail);
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  };

  check("hadamard orthogonality", [](std::string& d) {
    for (int n = 2; n <= 64; n *= 2) {
      const HadamardMatrix h(n);
      if (h.entries().transpose() * h.entries() != n * Eigen::MatrixXi::Identity(n, n)) {
        d = "H^T H != N I at N=" + std::to_string(n);
        return false;
      }
    }
    return true;
  });

  check("encode/decode identity", [](std::string& d) {
    Engine rng = make_engine(7, {1});
    std::uniform_int_distribution<int> dist(-7, 7);
    for (int n = 2; n <= 64; n *= 2) {
      const HadamardMatrix h(n);
      for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXi w(n);
        for (auto& x : w) x = dist(rng);
        if (decode(h, encode(h, w)) != w.cast<double>()) {
          d = "round trip failed at N=" + std::to_string(n);
          return false;
        }
      }
    }
    return true;
  });

  check("common-mode rejection", [](std::string& d) {
    // sigma_uc = 0, rho = 1: Hadamard decisions for cells 2..N must be exact.
    WvConfig cfg;
    cfg.noise = {0.7, 1.0, CommonModeMode::PerSweep};
    const int n = cfg.n;
    const HadamardMatrix h(n);
    CellArray arr(n, 2, cfg.device, 3);
    Engine rng = make_engine(11, {2});
    std::uniform_int_distribution<int> dist(-7, 7);
    Eigen::VectorXi targets(n);
    for (int r = 0; r < n; ++r) {
      targets[r] = dist(rng);
      const int col = targets[r] >= 0 ? 0 : 1;
      arr.set_conductance(r, col, level_to_conductance(cfg.device, std::abs(targets[r])));
    }
    const auto req = VerifyRequest::uniform({0, 1}, targets, cfg.decision_threshold_lsb);
    for (auto scheme : {Scheme::hdpv(), Scheme::harp()}) {
      cfg.scheme = scheme;
      CostLedger ledger(cfg.cost_params());
      for (int sweep = 0; sweep < 200; ++sweep) {
        const SweepContext ctx = begin_sweep(0, cfg.noise, rng);
        const auto res = verify_sweep(arr, req, &h, cfg, ctx, ledger, rng);
        for (int r = 1; r < n; ++r)
          if (res.decisions[r] != CellDecision::Stop) {
            d = to_string(scheme) + " mis-decided cell " + std::to_string(r + 1);
            return false;
          }
      }
    }
    return true;
  });

  check("quantize/slice/recombine", [](std::string& d) {
    for (int code = -31; code <= 31; ++code) {
      if (recombine(slice_code(code, 6, 3), 3, code < 0 ? -1 : 1) != code) {
        d = "code " + std::to_string(code);
        return false;
      }
    }
    Eigen::VectorXd w(3);
    w << -1.0, 0.0, 1.0;
    const Quantized q = quantize(w, 6);
    if (q.codes != Eigen::Vector3i(-31, 0, 31)) {
      d = "endpoint codes";
      return false;
    }
    return true;
  });

  check("weight container round trip", [](std::string& d) {
    Engine rng = make_engine(5, {3});
    std::normal_distribution<double> dist(0.0, 1.0);
    WeightFile f;
    f.tensor.shape = {4, 16};
    f.tensor.values.resize(64);
    for (auto& v : f.tensor.values) v = dist(rng) * 1e-3;
    f.tensor.values[0] = 0.1;
    f.tensor.values[1] = -0.0;
    f.tensor.values[2] = 5e-324;
    f.scale = 1.0 / 31.0;
    f.seed = 42;
    std::stringstream ss;
    write_weights(ss, f);
    const WeightFile g = read_weights(ss);
    for (Eigen::Index i = 0; i < f.tensor.values.size(); ++i)
      if (std::memcmp(&f.tensor.values[i], &g.tensor.values[i], sizeof(double)) != 0) {
        d = "value " + std::to_string(i) + " changed";
        return false;
      }
    return g.scale == f.scale && g.seed == f.seed && g.tensor.shape == f.tensor.shape;
  });

  return out;
}

}  // namespace hdwv
