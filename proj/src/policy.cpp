#include "bdrelay/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bdrelay/error.hpp"

namespace bdrelay {

Mode mode_from_index(int k) {
  if (k < 1 || k > 6) throw ParameterError("mode index must be in 1..6");
  return static_cast<Mode>(k);
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::uplink1: return "uplink1";
    case Mode::uplink2: return "uplink2";
    case Mode::multiple_access: return "multiple_access";
    case Mode::downlink1: return "downlink1";
    case Mode::downlink2: return "downlink2";
    case Mode::broadcast: return "broadcast";
  }
  return "unknown";
}

void Thresholds::validate() const {
  if (!(mu1 > 0.0 && mu1 < 1.0) || !(mu2 > 0.0 && mu2 < 1.0)) {
    throw ParameterError("thresholds mu1, mu2 must lie in the open interval (0, 1)");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("threshold gamma must be positive and finite");
  }
}

double optimal_time_share(const FadingStatistics& stats) {
  stats.validate();
  return stats.omega1 >= stats.omega2 ? 0.0 : 1.0;
}

double water_fill(double weight, double gamma, double s) {
  if (!(s > 0.0)) return 0.0;
  const double g = gamma * std::numbers::ln2;
  return std::max(0.0, weight / g - 1.0 / s);
}

double broadcast_power(double s1, double s2, double mu1, double mu2, double gamma) {
  const double g = gamma * std::numbers::ln2;
  const double a = g * s1 * s2;
  const double b = g * (s1 + s2) - (mu1 + mu2) * s1 * s2;
  const double c = g - mu1 * s2 - mu2 * s1;
  // c >= 0: the marginal gain at zero power is already below the price.
  if (!(c < 0.0)) return 0.0;
  const double sq = std::sqrt(b * b - 4.0 * a * c);
  // Pick the cancellation-free form of the larger root.
  const double root = b >= 0.0 ? (2.0 * c) / (-b - sq) : (-b + sq) / (2.0 * a);
  return std::max(root, 0.0);
}

double mac_metric(double s1, double s2, double mu1, double mu2, double gamma, double t,
                  double p1, double p2) {
  const LinkCapacities c = link_capacities({1, s1, s2}, {p1, p2, 0.0}, t);
  return (1.0 - mu1) * c.c12r + (1.0 - mu2) * c.c21r - gamma * (p1 + p2);
}

MacPowers mac_powers(double s1, double s2, double mu1, double mu2, double gamma, double t) {
  if (t != 0.0 && t != 1.0) throw DomainError("mac_powers: time share must be 0 or 1");

  // Boundary candidates: one user silent, the other water-fills alone.
  MacPowers best{water_fill(1.0 - mu1, gamma, s1), 0.0};
  double best_metric = mac_metric(s1, s2, mu1, mu2, gamma, t, best.p1, best.p2);

  const MacPowers only2{0.0, water_fill(1.0 - mu2, gamma, s2)};
  const double only2_metric = mac_metric(s1, s2, mu1, mu2, gamma, t, only2.p1, only2.p2);
  if (only2_metric > best_metric) {
    best = only2;
    best_metric = only2_metric;
  }

  // Joint stationary point with both users active.
  if (s1 > 0.0 && s2 > 0.0 && s1 != s2) {
    const double g = gamma * std::numbers::ln2;
    MacPowers joint;
    if (t == 0.0) {
      const double d = s1 - s2;
      joint.p2 = (mu1 - mu2) * s1 / (g * d) - 1.0 / s2;
      joint.p1 = (1.0 - mu1) / g - (mu1 - mu2) * s2 / (g * d);
    } else {
      const double d = s2 - s1;
      joint.p1 = (mu2 - mu1) * s2 / (g * d) - 1.0 / s1;
      joint.p2 = (1.0 - mu2) / g - (mu2 - mu1) * s1 / (g * d);
    }
    if (joint.p1 > 0.0 && joint.p2 > 0.0) {
      const double joint_metric = mac_metric(s1, s2, mu1, mu2, gamma, t, joint.p1, joint.p2);
      if (joint_metric > best_metric) best = joint;
    }
  }
  return best;
}

ModePowers mode_powers(const ChannelState& ch, const Thresholds& th,
                       const FadingStatistics& stats) {
  th.validate();
  const double t = optimal_time_share(stats);

  ModePowers mp;
  mp.p1_m1 = water_fill(1.0 - th.mu1, th.gamma, ch.s1);
  mp.p2_m2 = water_fill(1.0 - th.mu2, th.gamma, ch.s2);
  const MacPowers mac = mac_powers(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma, t);
  mp.p1_m3 = mac.p1;
  mp.p2_m3 = mac.p2;
  mp.pr_m4 = water_fill(th.mu2, th.gamma, ch.s1);
  mp.pr_m5 = water_fill(th.mu1, th.gamma, ch.s2);
  mp.pr_m6 = broadcast_power(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma);
  return mp;
}

SelectionMetrics selection_metrics(const ChannelState& ch, const Thresholds& th,
                                   const ModePowers& mp, double t) {
  SelectionMetrics m;
  auto& l = m.lambda;
  l[0] = (1.0 - th.mu1) * cap(mp.p1_m1 * ch.s1) - th.gamma * mp.p1_m1;
  l[1] = (1.0 - th.mu2) * cap(mp.p2_m2 * ch.s2) - th.gamma * mp.p2_m2;
  l[2] = mac_metric(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma, t, mp.p1_m3, mp.p2_m3);
  l[3] = th.mu2 * cap(mp.pr_m4 * ch.s1) - th.gamma * mp.pr_m4;
  l[4] = th.mu1 * cap(mp.pr_m5 * ch.s2) - th.gamma * mp.pr_m5;
  l[5] = th.mu1 * cap(mp.pr_m6 * ch.s2) + th.mu2 * cap(mp.pr_m6 * ch.s1) -
         th.gamma * mp.pr_m6;
  return m;
}

Mode select_mode(const SelectionMetrics& metrics) {
  for (double v : metrics.lambda) {
    if (std::isnan(v)) throw ComputationError("selection metric is NaN");
  }
  Mode best = Mode::uplink1;
  for (Mode m : {Mode::uplink2, Mode::multiple_access, Mode::broadcast}) {
    if (metrics[m] > metrics[best]) best = m;
  }
  return best;
}

SlotDecision decide_slot(const ChannelState& ch, const Thresholds& th,
                         const FadingStatistics& stats) {
  const double t = optimal_time_share(stats);
  const ModePowers mp = mode_powers(ch, th, stats);
  const SelectionMetrics metrics = selection_metrics(ch, th, mp, t);

  SlotDecision d;
  d.mode = select_mode(metrics);
  d.t = t;
  switch (d.mode) {
    case Mode::uplink1: d.powers.p1 = mp.p1_m1; break;
    case Mode::uplink2: d.powers.p2 = mp.p2_m2; break;
    case Mode::multiple_access:
      d.powers.p1 = mp.p1_m3;
      d.powers.p2 = mp.p2_m3;
      break;
    case Mode::downlink1: d.powers.pr = mp.pr_m4; break;
    case Mode::downlink2: d.powers.pr = mp.pr_m5; break;
    case Mode::broadcast: d.powers.pr = mp.pr_m6; break;
  }
  d.rates = link_capacities(ch, d.powers, t);
  return d;
}

}  // namespace bdrelay
