#include "bdrelay/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bdrelay/error.hpp"
#include "log_root.hpp"

namespace bdrelay {

namespace {

constexpr int kBisectionSteps = 40;

double tdbc_pa_power(Mode m, const ChannelState& ch, double gamma) {
  switch (m) {
    case Mode::uplink1: return water_fill(1.0, gamma, ch.s1);
    case Mode::uplink2: return water_fill(1.0, gamma, ch.s2);
    default: return broadcast_power(ch.s1, ch.s2, 1.0, 1.0, gamma);
  }
}

// Per-slot capacities at equal node power P, reused across threshold
// evaluations.
struct FixedPowerTable {
  std::vector<LinkCapacities> caps;
  bool six_mode = true;

  FixedPowerTable(const ChannelTrace& trace, double power, double t, bool six)
      : six_mode(six) {
    caps.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
      caps.push_back(link_capacities(trace[i], {power, power, power}, t));
    }
  }
};

Mode select_fixed(const std::array<double, 6>& l, bool six_mode) {
  int best = 0;
  for (int k : {1, 2, 3, 4, 5}) {
    if (!six_mode && (k == 2 || k == 3 || k == 4)) continue;
    if (l[static_cast<std::size_t>(k)] > l[static_cast<std::size_t>(best)]) best = k;
  }
  return mode_from_index(best + 1);
}

std::array<double, 6> metrics_from(const LinkCapacities& c, double mu1, double mu2) {
  return {(1.0 - mu1) * c.c1r,
          (1.0 - mu2) * c.c2r,
          (1.0 - mu1) * c.c12r + (1.0 - mu2) * c.c21r,
          mu2 * c.cr1,
          mu1 * c.cr2,
          mu1 * c.cr2 + mu2 * c.cr1};
}

struct FixedPowerAverages {
  double r_1r = 0.0, r_2r = 0.0, r_r1 = 0.0, r_r2 = 0.0;
  double f3 = 0.0;
};

FixedPowerAverages average(const FixedPowerTable& tab, double mu1, double mu2) {
  FixedPowerAverages a;
  for (const LinkCapacities& c : tab.caps) {
    switch (select_fixed(metrics_from(c, mu1, mu2), tab.six_mode)) {
      case Mode::uplink1: a.r_1r += c.c1r; break;
      case Mode::uplink2: a.r_2r += c.c2r; break;
      case Mode::multiple_access:
        a.r_1r += c.c12r;
        a.r_2r += c.c21r;
        a.f3 += 1.0;
        break;
      case Mode::downlink1: a.r_r1 += c.cr1; break;
      case Mode::downlink2: a.r_r2 += c.cr2; break;
      case Mode::broadcast:
        a.r_r1 += c.cr1;
        a.r_r2 += c.cr2;
        break;
    }
  }
  const double n = static_cast<double>(tab.caps.size());
  a.r_1r /= n;
  a.r_2r /= n;
  a.r_r1 /= n;
  a.r_r2 /= n;
  a.f3 /= n;
  return a;
}

// The threshold-weighted objective is convex in (mu1, mu2) with gradient
// (Rr2 - R1r, Rr1 - R2r), so each partial derivative is monotone in its own
// coordinate: bisect mu1 for a fixed mu2, and mu2 on the partially minimized
// function outside.
std::pair<double, double> balance_thresholds(const FixedPowerTable& tab) {
  auto inner = [&](double mu2) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < kBisectionSteps; ++i) {
      const double mid = 0.5 * (lo + hi);
      const FixedPowerAverages a = average(tab, mid, mu2);
      if (a.r_r2 - a.r_1r < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    const FixedPowerAverages a = average(tab, inner(mid), mid);
    if (a.r_r1 - a.r_2r < 0.0) lo = mid; else hi = mid;
  }
  const double mu2 = 0.5 * (lo + hi);
  return {inner(mu2), mu2};
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(b, 1e-12); }

}  // namespace

std::string_view benchmark_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::tdbc_no_pa: return "tdbc_no_pa";
    case BenchmarkKind::tdbc_pa: return "tdbc_pa";
    case BenchmarkKind::fixed_power_six_mode: return "fixed_power_six_mode";
    case BenchmarkKind::fixed_power_three_mode: return "fixed_power_three_mode";
  }
  return "unknown";
}

std::optional<BenchmarkKind> parse_benchmark(std::string_view name) {
  for (BenchmarkKind k : {BenchmarkKind::tdbc_no_pa, BenchmarkKind::tdbc_pa,
                          BenchmarkKind::fixed_power_six_mode,
                          BenchmarkKind::fixed_power_three_mode}) {
    if (benchmark_name(k) == name) return k;
  }
  return std::nullopt;
}

void BenchmarkConfig::validate() const {
  if (!(p_total > 0.0) || !std::isfinite(p_total)) {
    throw ParameterError("benchmark p_total must be positive and finite");
  }
  if (!(fixed_power >= 0.0) || !std::isfinite(fixed_power)) {
    throw ParameterError("fixed_power must be positive (or 0 to scale to the budget)");
  }
  if (thresholds) {
    const auto [m1, m2] = *thresholds;
    if (!(m1 >= 0.0 && m1 <= 1.0) || !(m2 >= 0.0 && m2 <= 1.0)) {
      throw ParameterError("benchmark thresholds must lie in [0, 1]");
    }
  }
  if (!(time_share >= 0.0 && time_share <= 1.0)) {
    throw ParameterError("time_share must lie in [0, 1]");
  }
  if (!(tol_rate > 0.0) || !(tol_power > 0.0)) {
    throw ParameterError("benchmark tolerances must be positive");
  }
}

TdbcProtocol::TdbcProtocol(bool power_allocation, double p_total, double gamma, bool buffered)
    : power_allocation_(power_allocation), p_total_(p_total), gamma_(gamma), buffered_(buffered) {
  if (!(p_total > 0.0) || !std::isfinite(p_total)) {
    throw ParameterError("TDBC p_total must be positive and finite");
  }
  if (power_allocation && (!(gamma > 0.0) || !std::isfinite(gamma))) {
    throw ParameterError("TDBC with power allocation needs a positive gamma");
  }
}

Mode TdbcProtocol::scheduled_mode(std::uint64_t slot) {
  if (slot == 0) throw ParameterError("slots are numbered from 1");
  switch (slot % 3) {
    case 1: return Mode::uplink1;
    case 2: return Mode::uplink2;
    default: return Mode::broadcast;
  }
}

std::string TdbcProtocol::name() const {
  return std::string(benchmark_name(power_allocation_ ? BenchmarkKind::tdbc_pa
                                                      : BenchmarkKind::tdbc_no_pa));
}

SlotDecision TdbcProtocol::decide(const ChannelState& ch, const QueueState& queues) const {
  SlotDecision d;
  d.mode = scheduled_mode(ch.slot);
  double p = power_allocation_ ? tdbc_pa_power(d.mode, ch, gamma_) : p_total_;
  if (power_allocation_ && !buffered_ && d.mode == Mode::broadcast) {
    // Whatever is not forwarded now is lost, and nothing beyond the buffer
    // contents can be forwarded: spend no more than emptying both needs.
    double need = 0.0;
    if (queues.q1 > 0.0) need = std::max(need, std::expm1(queues.q1 * std::numbers::ln2) / ch.s2);
    if (queues.q2 > 0.0) need = std::max(need, std::expm1(queues.q2 * std::numbers::ln2) / ch.s1);
    p = std::min(p, need);
  }
  switch (d.mode) {
    case Mode::uplink1: d.powers.p1 = p; break;
    case Mode::uplink2: d.powers.p2 = p; break;
    default: d.powers.pr = p; break;
  }
  d.rates = link_capacities(ch, d.powers, d.t);
  return d;
}

TdbcProtocol tdbc_policy(const BenchmarkConfig& cfg, const ChannelTrace& trace) {
  cfg.validate();
  if (cfg.kind == BenchmarkKind::tdbc_no_pa) {
    return TdbcProtocol(false, cfg.p_total, 0.0, cfg.tdbc_buffered);
  }
  if (cfg.kind != BenchmarkKind::tdbc_pa) throw ParameterError("not a TDBC benchmark kind");
  if (trace.empty()) throw ParameterError("TDBC power allocation needs a non-empty trace");

  // The relay's spend depends on what it received, so each evaluation runs
  // the schedule through the engine.
  auto excess = [&](double x) {
    const TdbcProtocol p(true, cfg.p_total, std::exp(x), cfg.tdbc_buffered);
    return run(trace, p).avg_power / cfg.p_total - 1.0;
  };
  const double x = detail::solve_decreasing_log(
      excess, -std::log(cfg.p_total * std::numbers::ln2), 1e-10);
  return TdbcProtocol(true, cfg.p_total, std::exp(x), cfg.tdbc_buffered);
}

std::array<double, 6> fixed_power_metrics(const ChannelState& ch, double power, double mu1,
                                          double mu2, double t) {
  return metrics_from(link_capacities(ch, {power, power, power}, t), mu1, mu2);
}

FixedPowerProtocol::FixedPowerProtocol(bool six_mode, double power, double mu1, double mu2,
                                       double t)
    : six_mode_(six_mode), power_(power), mu1_(mu1), mu2_(mu2), t_(t) {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw ParameterError("fixed node power must be positive and finite");
  }
  if (!(mu1 >= 0.0 && mu1 <= 1.0) || !(mu2 >= 0.0 && mu2 <= 1.0)) {
    throw ParameterError("fixed-power thresholds must lie in [0, 1]");
  }
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("time_share must lie in [0, 1]");
}

std::string FixedPowerProtocol::name() const {
  return std::string(benchmark_name(six_mode_ ? BenchmarkKind::fixed_power_six_mode
                                              : BenchmarkKind::fixed_power_three_mode));
}

SlotDecision FixedPowerProtocol::decide(const ChannelState& ch, const QueueState&) const {
  const LinkCapacities all = link_capacities(ch, {power_, power_, power_}, t_);
  SlotDecision d;
  d.mode = select_fixed(metrics_from(all, mu1_, mu2_), six_mode_);
  d.t = t_;
  switch (d.mode) {
    case Mode::uplink1: d.powers.p1 = power_; break;
    case Mode::uplink2: d.powers.p2 = power_; break;
    case Mode::multiple_access:
      d.powers.p1 = power_;
      d.powers.p2 = power_;
      break;
    default: d.powers.pr = power_; break;
  }
  d.rates = link_capacities(ch, d.powers, t_);
  return d;
}

FixedPowerProtocol fixed_power_policy(const BenchmarkConfig& cfg, const ChannelTrace& trace) {
  cfg.validate();
  const bool six = cfg.kind == BenchmarkKind::fixed_power_six_mode;
  if (!six && cfg.kind != BenchmarkKind::fixed_power_three_mode) {
    throw ParameterError("not a fixed-power benchmark kind");
  }
  if (trace.empty()) throw ParameterError("fixed-power calibration needs a non-empty trace");

  const bool scale = cfg.fixed_power == 0.0;
  double power = scale ? cfg.p_total : cfg.fixed_power;
  std::pair<double, double> mu{0.5, 0.5};
  FixedPowerAverages avg;
  bool power_ok = !scale || !six;

  // Only the six-mode variant has a two-transmitter mode, so only its
  // consumed power P (1 + f3) differs from P.
  for (int it = 0; it < 50; ++it) {
    const FixedPowerTable tab(trace, power, cfg.time_share, six);
    mu = cfg.thresholds ? *cfg.thresholds : balance_thresholds(tab);
    avg = average(tab, mu.first, mu.second);
    if (!scale || !six) break;
    const double next = cfg.p_total / (1.0 + avg.f3);
    if (rel_gap(next, power) <= 0.1 * cfg.tol_power) {
      power_ok = true;
      break;
    }
    power = next;
  }

  FixedPowerCalibration cal;
  cal.mu1 = mu.first;
  cal.mu2 = mu.second;
  cal.power = power;
  cal.residual_c1 = rel_gap(avg.r_1r, avg.r_r2);
  cal.residual_c2 = rel_gap(avg.r_2r, avg.r_r1);
  cal.residual_power = rel_gap(power * (1.0 + avg.f3), cfg.p_total);
  cal.converged = power_ok && cal.residual_c1 <= cfg.tol_rate && cal.residual_c2 <= cfg.tol_rate &&
                  (!scale || cal.residual_power <= cfg.tol_power);

  FixedPowerProtocol p(six, power, mu.first, mu.second, cfg.time_share);
  p.set_calibration(cal);
  return p;
}

}  // namespace bdrelay
