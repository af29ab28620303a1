// Copyright 2026 The hdwv Authors.
// SPDX-License-Identifier: Apache-2.0
#include "hdwv/wv_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "hdwv/error.hpp"

namespace hdwv {

CellDecision decide(double estimate_lsb, double target_lsb, double threshold) {
  const double dev = estimate_lsb - target_lsb;
  if (dev > threshold) return CellDecision::Reset;
  if (dev < -threshold) return CellDecision::Set;
  return CellDecision::Stop;
}

int WvConfig::resolution() const {
  return adc_bits > 0 ? adc_bits : min_signed_resolution(n * device.max_level());
}

AdcConfig WvConfig::adc() const { return {resolution(), SamplingRef::HalfVcm, 1.0}; }

CostParams WvConfig::cost_params() const { return cost ? *cost : CostParams::for_resolution(resolution()); }

void WvConfig::validate() const {
  if (n < 1) throw Error(ErrorCode::ConfigInconsistent, "column length must be >= 1");
  if (scheme.uses_hadamard() && !is_power_of_two(n))
    throw Error(ErrorCode::NonPowerOfTwo, "Hadamard schemes need a power-of-two column, got " + std::to_string(n));
  if (b_c != device.bits_per_cell)
    throw Error(ErrorCode::ConfigInconsistent, "b_c differs from device bits_per_cell");
  if (b < 2 || b_c < 1 || b % b_c != 0)
    throw Error(ErrorCode::ConfigInconsistent, "B must be a positive multiple of B_C");
  if (k_streak < 1) throw Error(ErrorCode::ConfigInconsistent, "K must be >= 1");
  if (scheme.kind == SchemeKind::MultiRead && scheme.reads_per_cell < 1)
    throw Error(ErrorCode::ConfigInconsistent, "MultiRead needs M >= 1");
  if (tau_w < 0) throw Error(ErrorCode::ConfigInconsistent, "tau_w must be >= 0");
  if (decision_threshold_lsb <= 0.0) throw Error(ErrorCode::ConfigInconsistent, "threshold must be > 0");
  if (max_fine_iters < 0 || max_coarse_iters < 0 || max_pulses_per_iter < 1)
    throw Error(ErrorCode::ConfigInconsistent, "iteration and pulse limits must be non-negative");
  device.validate();
  noise.validate();
  cost_params().validate();
}

VerifyRequest VerifyRequest::uniform(ColumnRef col, Eigen::VectorXi targets, double threshold) {
  const auto n = targets.size();
  return {col, std::move(targets), Eigen::VectorXd::Constant(n, threshold)};
}

SamplingRef sampling_ref_for_row(int row, bool signed_pair) {
  // A signed pair can drive the all-ones row negative, so it needs the
  // centred window as well.
  return row == 0 && !signed_pair ? SamplingRef::Ground : SamplingRef::HalfVcm;
}

namespace {

void check_request(const CellArray& array, const VerifyRequest& req) {
  if (req.targets.size() != array.rows() || req.thresholds.size() != array.rows())
    throw Error(ErrorCode::DimensionMismatch, "verify request does not match column length");
}

CellDecision from_comparison(Comparison c) {
  switch (c) {
    case Comparison::Low: return CellDecision::Set;
    case Comparison::High: return CellDecision::Reset;
    case Comparison::Equal: break;
  }
  return CellDecision::Stop;
}

SweepResult decide_all(const VerifyRequest& req, Eigen::VectorXd estimate) {
  SweepResult out;
  out.decisions.reserve(req.targets.size());
  for (Eigen::Index i = 0; i < req.targets.size(); ++i)
    out.decisions.push_back(decide(estimate[i], req.targets[i], req.thresholds[i]));
  out.estimate = std::move(estimate);
  return out;
}

}  // namespace

SweepResult verify_sweep_cwsc(const CellArray& array, const VerifyRequest& req, const WvConfig& cfg,
                              const SweepContext& ctx, CostLedger& ledger, Engine& rng) {
  check_request(array, req);
  const int n = array.rows();
  const Eigen::VectorXd levels = column_levels(array, req.column);
  const AdcConfig adc = cfg.adc();
  SweepResult out;
  out.decisions.reserve(n);
  Eigen::VectorXi pattern = Eigen::VectorXi::Zero(n);
  for (int i = 0; i < n; ++i) {
    pattern[i] = 1;
    const double v = observe(levels, pattern, ctx, cfg.noise, rng);
    pattern[i] = 0;
    out.decisions.push_back(from_comparison(compare_to_target(v, req.targets[i], adc, ledger).outcome));
  }
  return out;
}

SweepResult verify_sweep_multiread(const CellArray& array, const VerifyRequest& req, int m, const WvConfig& cfg,
                                   const SweepContext& ctx, CostLedger& ledger, Engine& rng) {
  check_request(array, req);
  if (m < 1) throw Error(ErrorCode::ConfigInconsistent, "MultiRead needs M >= 1");
  const int n = array.rows();
  const Eigen::VectorXd levels = column_levels(array, req.column);
  const AdcConfig adc = cfg.adc();
  Eigen::VectorXd estimate(n);
  Eigen::VectorXi pattern = Eigen::VectorXi::Zero(n);
  for (int i = 0; i < n; ++i) {
    pattern[i] = 1;
    long sum = 0;
    for (int r = 0; r < m; ++r) sum += convert(observe(levels, pattern, ctx, cfg.noise, rng), adc, ledger);
    pattern[i] = 0;
    estimate[i] = static_cast<double>(sum) / m;
  }
  return decide_all(req, std::move(estimate));
}

SweepResult verify_sweep_hdpv(const CellArray& array, const VerifyRequest& req, const HadamardMatrix& h,
                              const WvConfig& cfg, const SweepContext& ctx, CostLedger& ledger, Engine& rng) {
  check_request(array, req);
  detail::check_length(h, array.rows());
  const int n = h.order();
  const Eigen::VectorXd levels = column_levels(array, req.column);
  const AdcConfig adc = cfg.adc();
  Eigen::VectorXi codes(n);
  for (int i = 0; i < n; ++i) {
    const double v = observe(levels, h.row(i).transpose(), ctx, cfg.noise, rng);
    codes[i] = convert(v, adc.with_ref(sampling_ref_for_row(i, req.column.is_pair())), ledger);
  }
  ledger.charge({EventKind::IhDecode, 1, DecodeClass::HdPv});
  return decide_all(req, decode(h, codes));
}

SweepResult verify_sweep_harp(const CellArray& array, const VerifyRequest& req, const HadamardMatrix& h,
                              const WvConfig& cfg, const SweepContext& ctx, CostLedger& ledger, Engine& rng) {
  check_request(array, req);
  detail::check_length(h, array.rows());
  const int n = h.order();
  const Eigen::VectorXd levels = column_levels(array, req.column);
  const Eigen::VectorXi y_target = h.entries() * req.targets;
  const AdcConfig adc = cfg.adc();
  Eigen::VectorXi signs(n);
  for (int i = 0; i < n; ++i) {
    const double v = observe(levels, h.row(i).transpose(), ctx, cfg.noise, rng);
    const auto cmp =
        compare_to_target(v, y_target[i], adc.with_ref(sampling_ref_for_row(i, req.column.is_pair())), ledger);
    signs[i] = cmp.outcome == Comparison::Low ? -1 : cmp.outcome == Comparison::High ? 1 : 0;
  }
  ledger.charge({EventKind::IhDecode, 1, DecodeClass::Harp});
  const Eigen::VectorXi acc = decode_ternary(h, signs);
  SweepResult out;
  out.decisions.reserve(n);
  for (int i = 0; i < n; ++i)
    out.decisions.push_back(acc[i] > cfg.tau_w    ? CellDecision::Reset
                            : acc[i] < -cfg.tau_w ? CellDecision::Set
                                                  : CellDecision::Stop);
  return out;
}

SweepResult verify_sweep(const CellArray& array, const VerifyRequest& req, const HadamardMatrix* h,
                         const WvConfig& cfg, const SweepContext& ctx, CostLedger& ledger, Engine& rng) {
  switch (cfg.scheme.kind) {
    case SchemeKind::CwSc: return verify_sweep_cwsc(array, req, cfg, ctx, ledger, rng);
    case SchemeKind::MultiRead:
      return verify_sweep_multiread(array, req, cfg.scheme.reads_per_cell, cfg, ctx, ledger, rng);
    case SchemeKind::HdPv:
    case SchemeKind::Harp:
      if (h == nullptr) throw Error(ErrorCode::ConfigInconsistent, "Hadamard scheme without a Hadamard matrix");
      return cfg.scheme.kind == SchemeKind::HdPv ? verify_sweep_hdpv(array, req, *h, cfg, ctx, ledger, rng)
                                                 : verify_sweep_harp(array, req, *h, cfg, ctx, ledger, rng);
  }
  throw Error(ErrorCode::ConfigInconsistent, "unknown scheme");
}

Eigen::MatrixXi signed_slice_targets(const Eigen::VectorXi& codes, int b, int b_c) {
  const int k = b / b_c;
  const int max_code = (1 << (b - 1)) - 1;
  const int mask = (1 << b_c) - 1;
  Eigen::MatrixXi t(codes.size(), k);
  for (Eigen::Index r = 0; r < codes.size(); ++r) {
    const int code = codes[r];
    if (std::abs(code) > max_code)
      throw Error(ErrorCode::TargetNotRepresentable,
                  "code " + std::to_string(code) + " exceeds +-" + std::to_string(max_code));
    const int sign = code < 0 ? -1 : 1;
    int mag = std::abs(code);
    for (int l = 0; l < k; ++l, mag >>= b_c) t(r, l) = sign * (mag & mask);
  }
  return t;
}

namespace {

enum class Stage { Coarse, Fine, Frozen };

struct CellState {
  Stage stage = Stage::Coarse;
  int sign = 1;  // which column of the pair carries the weight
  int coarse_iters = 0;
  StreakCounter streak{1};
};

// Signed-domain verdict to the physical direction on the active cell.
std::optional<PulseDirection> physical(CellDecision d, int sign) {
  if (d == CellDecision::Stop) return std::nullopt;
  const bool up = (d == CellDecision::Set) == (sign > 0);
  return up ? PulseDirection::Set : PulseDirection::Reset;
}

struct PhasePlan {
  std::vector<PulseTarget> coarse_set, fine_set, fine_reset;
};

int pulses_for(double dev_lsb, double step_lsb, int cap) {
  const int p = static_cast<int>(std::lround(std::abs(dev_lsb) / step_lsb));
  return std::clamp(p, 1, cap);
}

void charge_phase(CellArray& array, const std::vector<PulseTarget>& targets, PulseMode mode, Engine& rng,
                  CostLedger& ledger) {
  if (targets.empty()) return;
  int max_pulses = 0;
  for (const auto& t : targets) max_pulses = std::max(max_pulses, t.pulse_count);
  array.apply_pulses(targets, mode, rng);
  ledger.charge({EventKind::WritePhase, max_pulses});
}

}  // namespace

WvResult run_wv(CellArray& group, const Eigen::VectorXi& target_codes, const WvConfig& cfg) {
  cfg.validate();
  const int n = cfg.n;
  const int k = cfg.slices();
  if (group.rows() != n || group.cols() != 2 * k || target_codes.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "column group must be N x 2k with N target codes");

  const Eigen::MatrixXi targets = signed_slice_targets(target_codes, cfg.b, cfg.b_c);
  std::optional<HadamardMatrix> h;
  if (cfg.scheme.uses_hadamard()) h.emplace(n);

  const double fine_step = cfg.device.fine_step_lsb;
  const double coarse_step = cfg.device.fine_step_lsb * cfg.device.coarse_steps_per_pulse;
  const bool magnitude = !cfg.scheme.compare_only();

  WvResult res;
  res.cost = CostLedger(cfg.cost_params());
  res.freeze_trace = Eigen::MatrixXi::Constant(n, k, -1);

  std::vector<CellState> cells(static_cast<std::size_t>(n) * k);
  auto cell = [&](int r, int l) -> CellState& { return cells[static_cast<std::size_t>(l) * n + r]; };
  int frozen = 0;
  for (int l = 0; l < k; ++l)
    for (int r = 0; r < n; ++r) {
      auto& c = cell(r, l);
      c.streak = StreakCounter(cfg.k_streak);
      c.sign = targets(r, l) < 0 ? -1 : (target_codes[r] < 0 ? -1 : 1);
      if (targets(r, l) == 0) {
        c.stage = Stage::Frozen;
        c.streak.freeze();
        res.freeze_trace(r, l) = 0;
        ++frozen;
      }
    }

  std::vector<Engine> read_rng, write_rng;
  for (int l = 0; l < k; ++l) {
    read_rng.push_back(make_engine(cfg.seed, {stream::kRead, static_cast<std::uint64_t>(l)}));
    write_rng.push_back(make_engine(cfg.seed, {stream::kWrite, static_cast<std::uint64_t>(l)}));
  }
  std::vector<std::optional<double>> static_cm(k);

  auto mean_abs_error = [&] {
    double s = 0.0;
    for (int l = 0; l < k; ++l)
      s += (column_levels(group, slice_pair(l)) - targets.col(l).cast<double>()).cwiseAbs().sum();
    return s / (n * k);
  };

  // Every cell starts at HRS, a known state, so the first coarse shot needs no
  // verify read.
  for (int l = 0; l < k; ++l) {
    PhasePlan pos, neg;
    for (int r = 0; r < n; ++r) {
      auto& c = cell(r, l);
      if (c.stage != Stage::Coarse || cfg.max_coarse_iters == 0) continue;
      // Longest coarse train that does not nominally overshoot.
      const int p = std::min(static_cast<int>(std::abs(targets(r, l)) / coarse_step), cfg.max_pulses_per_iter);
      if (p < 1) continue;
      ++c.coarse_iters;
      (c.sign > 0 ? pos : neg).coarse_set.push_back({r, c.sign > 0 ? 2 * l : 2 * l + 1, PulseDirection::Set, p});
    }
    charge_phase(group, pos.coarse_set, PulseMode::Coarse, write_rng[l], res.cost);
    charge_phase(group, neg.coarse_set, PulseMode::Coarse, write_rng[l], res.cost);
  }

  const int budget = cfg.max_coarse_iters + cfg.max_fine_iters;
  int it = 0;
  while (frozen < n * k && it < budget) {
    ++it;
    for (int l = 0; l < k; ++l) {
      bool active = false;
      for (int r = 0; r < n; ++r) active |= cell(r, l).stage != Stage::Frozen;
      if (!active) continue;
      const ColumnRef col = slice_pair(l);
      SweepContext ctx = begin_sweep(l, cfg.noise, read_rng[l]);
      if (cfg.noise.cm_mode == CommonModeMode::PerColumnStatic) {
        if (!static_cm[l]) static_cm[l] = ctx.mu_cm;
        ctx.mu_cm = *static_cm[l];
      }

      VerifyRequest req{col, targets.col(l), Eigen::VectorXd::Constant(n, cfg.decision_threshold_lsb)};
      for (int r = 0; r < n; ++r) {
        const auto& c = cell(r, l);
        if (c.stage == Stage::Coarse) req.thresholds[r] = coarse_step / 2.0;
      }
      const SweepResult sweep = verify_sweep(group, req, h ? &*h : nullptr, cfg, ctx, res.cost, read_rng[l]);

      PhasePlan pos, neg;
      for (int r = 0; r < n; ++r) {
        auto& c = cell(r, l);
        if (c.stage == Stage::Frozen) continue;
        auto& plan = c.sign > 0 ? pos : neg;
        const int phys_col = c.sign > 0 ? col.pos : col.neg;
        CellDecision d = sweep.decisions[r];

        if (c.stage == Stage::Coarse) {
          const auto dir = physical(d, c.sign);
          if (dir == PulseDirection::Set && c.coarse_iters < cfg.max_coarse_iters) {
            ++c.coarse_iters;
            const int p = magnitude ? pulses_for(sweep.estimate[r] - targets(r, l), coarse_step,
                                                 cfg.max_pulses_per_iter)
                                    : 1;
            plan.coarse_set.push_back({r, phys_col, PulseDirection::Set, p});
            continue;
          }
          c.stage = Stage::Fine;
          // A compare-only cell leaving the coarse stage starts its streak on
          // the next sweep.
          if (!magnitude) continue;
          d = decide(sweep.estimate[r], targets(r, l), cfg.decision_threshold_lsb);
        }

        if (c.streak.update(d)) {
          c.stage = Stage::Frozen;
          res.freeze_trace(r, l) = it;
          ++frozen;
          continue;
        }
        const auto dir = physical(d, c.sign);
        if (!dir) continue;
        const int p =
            magnitude ? pulses_for(sweep.estimate[r] - targets(r, l), fine_step, cfg.max_pulses_per_iter) : 1;
        (*dir == PulseDirection::Set ? plan.fine_set : plan.fine_reset).push_back({r, phys_col, *dir, p});
      }

      for (auto* plan : {&pos, &neg}) {
        charge_phase(group, plan->coarse_set, PulseMode::Coarse, write_rng[l], res.cost);
        charge_phase(group, plan->fine_set, PulseMode::Fine, write_rng[l], res.cost);
        charge_phase(group, plan->fine_reset, PulseMode::Fine, write_rng[l], res.cost);
      }
    }
    res.trace.push_back({it, mean_abs_error(), frozen, res.cost.total_ns(), res.cost.total_pj()});
  }

  res.iterations_used = it;
  res.converged = frozen == n * k;
  res.final_conductances = group.conductance();
  res.cell_error_lsb.resize(n, k);
  for (int l = 0; l < k; ++l)
    res.cell_error_lsb.col(l) = column_levels(group, slice_pair(l)) - targets.col(l).cast<double>();
  res.weight_error_lsb = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < k; ++l) res.weight_error_lsb += std::ldexp(1.0, l * cfg.b_c) * res.cell_error_lsb.col(l);
  res.rms_cell_lsb = std::sqrt(res.cell_error_lsb.squaredNorm() / (n * k));
  res.rms_weight_lsb = std::sqrt(res.weight_error_lsb.squaredNorm() / n);
  return res;
}

}  // namespace hdwv
