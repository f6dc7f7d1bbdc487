#include "bdrelay/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bdrelay/calibrate.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/kernels.hpp"

namespace bdrelay::oracle {

namespace {

double c(double x) { return std::log2(1.0 + x); }

// Uniform draws built straight from the generator output so the property
// suite does not depend on the standard library's distributions.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double gain() { return -std::log1p(-uniform()); }
  double log_uniform(double lo, double hi) {
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform());
  }
  Thresholds thresholds() {
    Thresholds th;
    th.mu1 = uniform(0.05, 0.95);
    th.mu2 = uniform(0.05, 0.95);
    th.gamma = log_uniform(0.05, 5.0);
    return th;
  }
  ChannelState channel() {
    ChannelState ch;
    ch.s1 = gain();
    ch.s2 = gain();
    return ch;
  }

 private:
  std::mt19937_64 rng_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

PropertyResult closed_form_property(Mode mode, const VerifyOptions& opts) {
  Draws rng(opts.seed + static_cast<std::uint64_t>(index_of(mode)));
  double worst_gap = -std::numeric_limits<double>::infinity();
  double worst_steps = 0.0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < opts.draws; ++i) {
    const ChannelState ch = rng.channel();
    const Thresholds th = rng.thresholds();
    // Alternate the multiple-access decoding order between draws.
    const FadingStatistics stats{1.0, i % 2 == 0 ? 1.0 : 2.0};
    const double t = optimal_time_share(stats);
    const ModePowers mp = mode_powers(ch, th, stats);
    const SelectionMetrics lam = selection_metrics(ch, th, mp, t);
    const double closed = lam[mode];

    double cf1 = 0.0, cf2 = 0.0;
    GridMax g;
    double step1 = 0.0, step2 = 0.0;
    const GridSpec grid = default_grid(mode, ch, th);
    switch (mode) {
      case Mode::uplink1: cf1 = mp.p1_m1; break;
      case Mode::uplink2: cf2 = mp.p2_m2; break;
      case Mode::broadcast: cf1 = mp.pr_m6; break;
      default:
        cf1 = mp.p1_m3;
        cf2 = mp.p2_m3;
        break;
    }
    if (mode == Mode::multiple_access) {
      // Coarse product grid, then a fine grid around the coarse argmax.
      const GridSpec coarse{grid.lo, grid.hi, 201};
      const GridMax gc = grid_max_metric(mode, ch, th, t, coarse, coarse);
      const double d = coarse.step();
      const GridSpec f1{std::max(0.0, gc.p1 - 2 * d), std::max(0.0, gc.p1 - 2 * d) + 4 * d, 201};
      const GridSpec f2{std::max(0.0, gc.p2 - 2 * d), std::max(0.0, gc.p2 - 2 * d) + 4 * d, 201};
      g = grid_max_metric(mode, ch, th, t, f1, f2);
      step1 = f1.step();
      step2 = f2.step();
    } else {
      g = grid_max_metric(mode, ch, th, t, grid);
      step1 = step2 = grid.step();
    }
    const double gap = g.metric - closed;
    const double steps =
        std::max(std::abs(g.p1 - cf1) / step1, std::abs(g.p2 - cf2) / step2);
    worst_gap = std::max(worst_gap, gap);
    worst_steps = std::max(worst_steps, steps);
    if (gap > 1e-6 || steps > 1.0 + 1e-9) ++bad;
  }
  PropertyResult r;
  r.name = "closed_form_optimality_m" + std::to_string(index_of(mode));
  r.pass = bad == 0;
  r.worst = worst_gap;
  r.detail = "draws=" + std::to_string(opts.draws) + " max(grid-closed)=" + fmt(worst_gap) +
             " max|dp|/step=" + fmt(worst_steps) + " failures=" + std::to_string(bad);
  return r;
}

PropertyResult broadcast_root_property(const VerifyOptions& opts) {
  Draws rng(opts.seed + 100);
  const std::size_t n = opts.draws * 10;
  double worst = 0.0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const ChannelState ch = rng.channel();
    const Thresholds th = rng.thresholds();
    const double pr = broadcast_power(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma);
    if (!(pr > 0.0)) continue;
    ++active;
    const double rhs = th.gamma * std::numbers::ln2;
    const double lhs = th.mu2 * ch.s1 / (1.0 + pr * ch.s1) + th.mu1 * ch.s2 / (1.0 + pr * ch.s2);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  PropertyResult r;
  r.name = "broadcast_root_residual";
  r.pass = worst <= 1e-8;
  r.worst = worst;
  r.detail = "draws=" + std::to_string(n) + " active=" + std::to_string(active) +
             " max_rel_residual=" + fmt(worst);
  return r;
}

PropertyResult t_boundary_property(const VerifyOptions& opts) {
  Draws rng(opts.seed + 200);
  std::size_t bad = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < opts.draws; ++i) {
    const ChannelState ch = rng.channel();
    Thresholds th = rng.thresholds();
    if (th.mu1 == th.mu2) th.mu2 = std::nextafter(th.mu2, 1.0);
    const double p1 = rng.uniform(0.1, 5.0);
    const double p2 = rng.uniform(0.1, 5.0);
    const TSweep sw = t_sweep(ch, th, p1, p2, 101);
    const double expect = th.mu1 > th.mu2 ? 0.0 : 1.0;
    const double best_end = std::max(sw.metric.front(), sw.metric.back());
    worst = std::max(worst, sw.max_metric - best_end);
    if (sw.argmax_t != expect) ++bad;
  }
  PropertyResult r;
  r.name = "t_boundary";
  r.pass = bad == 0;
  r.worst = worst;
  r.detail = "draws=" + std::to_string(opts.draws) + " mismatches=" + std::to_string(bad) +
             " max(interior-endpoint)=" + fmt(worst);
  return r;
}

PropertyResult dominance_property(const VerifyOptions& opts) {
  Draws rng(opts.seed + 300);
  const std::size_t n = opts.draws * 10;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const ChannelState ch = rng.channel();
    const Thresholds th = rng.thresholds();
    const FadingStatistics stats{1.0, 1.0};
    const SelectionMetrics lam = selection_metrics(ch, th, mode_powers(ch, th, stats), 0.0);
    worst = std::max(worst, std::max(lam[Mode::downlink1], lam[Mode::downlink2]) -
                                lam[Mode::broadcast]);
  }
  PropertyResult r;
  r.name = "broadcast_dominance";
  r.pass = worst <= 0.0;
  r.worst = worst;
  r.detail = "draws=" + std::to_string(n) + " max(max(L4,L5)-L6)=" + fmt(worst);
  return r;
}

PropertyResult symmetric_collapse_property(const VerifyOptions& opts) {
  Draws rng(opts.seed + 400);
  std::size_t bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < opts.draws; ++i) {
    const ChannelState ch = rng.channel();
    Thresholds th = rng.thresholds();
    th.mu2 = th.mu1;
    const FadingStatistics stats{1.0, 1.0};
    const ModePowers mp = mode_powers(ch, th, stats);
    const SelectionMetrics lam = selection_metrics(ch, th, mp, 0.0);
    const double excess =
        lam[Mode::multiple_access] - std::max(lam[Mode::uplink1], lam[Mode::uplink2]);
    worst = std::max(worst, excess);
    if ((mp.p1_m3 > 0.0 && mp.p2_m3 > 0.0) || excess > 1e-9) ++bad;
  }
  PropertyResult r;
  r.name = "symmetric_mac_collapse";
  r.pass = bad == 0;
  r.worst = worst;
  r.detail = "draws=" + std::to_string(opts.draws) + " max(L3-max(L1,L2))=" + fmt(worst);
  return r;
}

PropertyResult scale_invariance_property(const VerifyOptions& opts) {
  Draws rng(opts.seed + 500);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < opts.draws; ++i) {
    const ChannelState ch = rng.channel();
    const Thresholds th = rng.thresholds();
    const FadingStatistics stats{1.0, 1.0};
    SelectionMetrics lam = selection_metrics(ch, th, mode_powers(ch, th, stats), 0.0);
    const Mode m = select_mode(lam);
    // Powers of two keep the scaling exact.
    for (double& v : lam.lambda) v *= 8.0;
    if (select_mode(lam) != m) ++bad;
  }
  PropertyResult r;
  r.name = "argmax_scale_invariance";
  r.pass = bad == 0;
  r.worst = static_cast<double>(bad);
  r.detail = "draws=" + std::to_string(opts.draws) + " changed=" + std::to_string(bad);
  return r;
}

PropertyResult power_monotone_property(const VerifyOptions& opts) {
  Draws rng(opts.seed + 600);
  const ChannelTrace trace = sample_trace({1.0, 1.0}, 2000, opts.seed);
  double worst = -std::numeric_limits<double>::infinity();
  const std::size_t n = std::max<std::size_t>(1, opts.draws / 20);
  for (std::size_t i = 0; i < n; ++i) {
    const Thresholds th = rng.thresholds();
    const auto pw = [&](double gamma) {
      const kernels::SlotSums s =
          kernels::accumulate({th.mu1, th.mu2, gamma, 0.0}, trace.s1(), trace.s2());
      return s.power / static_cast<double>(s.slots);
    };
    worst = std::max(worst, pw(2.0 * th.gamma) - pw(th.gamma));
  }
  PropertyResult r;
  r.name = "power_nonincreasing_in_gamma";
  r.pass = worst <= 1e-9;
  r.worst = worst;
  r.detail = "draws=" + std::to_string(n) + " max(P(2g)-P(g))=" + fmt(worst);
  return r;
}

PropertyResult region_property(const VerifyOptions& opts) {
  const ChannelTrace trace = sample_trace({1.0, 1.0}, 2000, opts.seed);
  const std::vector<double> mus{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t feasible_boundary = 0;
  double best_boundary = std::numeric_limits<double>::infinity();
  for (const RegionPoint& p : threshold_region_scan(trace, 1.0, mus, 0.02)) {
    if (!p.boundary) continue;
    best_boundary = std::min(best_boundary, std::max(p.residual_c1, p.residual_c2));
    if (p.feasible) ++feasible_boundary;
  }
  PropertyResult r;
  r.name = "threshold_region_boundary";
  r.pass = feasible_boundary == 0;
  r.worst = best_boundary;
  r.detail = "boundary points feasible=" + std::to_string(feasible_boundary) +
             " smallest boundary residual=" + fmt(best_boundary);
  return r;
}

}  // namespace

void GridSpec::validate() const {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw ParameterError("grid bounds must satisfy 0 <= lo < hi");
  }
  if (points < 100) throw ParameterError("grid needs at least 100 points");
}

double metric_at(Mode mode, const ChannelState& ch, const Thresholds& th, double t, double p1,
                 double p2) {
  const double g = th.gamma;
  switch (mode) {
    case Mode::uplink1: return (1.0 - th.mu1) * c(p1 * ch.s1) - g * p1;
    case Mode::uplink2: return (1.0 - th.mu2) * c(p2 * ch.s2) - g * p2;
    case Mode::multiple_access: {
      const double x1 = p1 * ch.s1;
      const double x2 = p2 * ch.s2;
      const double r12 = t * c(x1) + (1.0 - t) * c(x1 / (1.0 + x2));
      const double r21 = (1.0 - t) * c(x2) + t * c(x2 / (1.0 + x1));
      return (1.0 - th.mu1) * r12 + (1.0 - th.mu2) * r21 - g * (p1 + p2);
    }
    case Mode::downlink1: return th.mu2 * c(p1 * ch.s1) - g * p1;
    case Mode::downlink2: return th.mu1 * c(p1 * ch.s2) - g * p1;
    case Mode::broadcast: return th.mu1 * c(p1 * ch.s2) + th.mu2 * c(p1 * ch.s1) - g * p1;
  }
  throw ParameterError("unknown mode");
}

GridSpec default_grid(Mode, const ChannelState& ch, const Thresholds& th, std::size_t points) {
  const double smin = std::min(ch.s1, ch.s2);
  const double scale = smin > 0.0 ? std::max(1.0, 1.0 / smin) : 1e6;
  return GridSpec{0.0, std::min(10.0 / th.gamma * scale, 1e6), points};
}

GridMax grid_max_metric(Mode mode, const ChannelState& ch, const Thresholds& th, double t,
                        const GridSpec& grid, const std::optional<GridSpec>& second) {
  grid.validate();
  if (second) second->validate();
  GridMax best;
  best.metric = -std::numeric_limits<double>::infinity();
  auto consider = [&](double a, double b) {
    const double m = metric_at(mode, ch, th, t, a, b);
    if (m > best.metric) best = GridMax{a, b, m};
  };
  if (mode == Mode::multiple_access) {
    const GridSpec& g2 = second ? *second : grid;
    for (std::size_t i = 0; i < grid.points; ++i) {
      for (std::size_t j = 0; j < g2.points; ++j) consider(grid.at(i), g2.at(j));
    }
  } else if (mode == Mode::uplink2) {
    for (std::size_t i = 0; i < grid.points; ++i) consider(0.0, grid.at(i));
  } else {
    for (std::size_t i = 0; i < grid.points; ++i) consider(grid.at(i), 0.0);
  }
  return best;
}

TSweep t_sweep(const ChannelState& ch, const Thresholds& th, double p1, double p2,
               std::size_t points) {
  if (points < 3) throw ParameterError("t_sweep needs at least 3 points");
  TSweep s;
  s.max_metric = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const double m = metric_at(Mode::multiple_access, ch, th, t, p1, p2);
    s.t.push_back(t);
    s.metric.push_back(m);
    if (m > s.max_metric) {
      s.max_metric = m;
      s.argmax_t = t;
    }
  }
  return s;
}

std::vector<RegionPoint> threshold_region_scan(const ChannelTrace& trace, double p_total,
                                               const std::vector<double>& mu_values,
                                               double tol_rate) {
  if (trace.empty()) throw ParameterError("region scan needs a non-empty trace");
  if (mu_values.empty()) throw ParameterError("region scan needs threshold values");
  for (double m : mu_values) {
    if (!(m >= 0.0 && m <= 1.0)) throw ParameterError("scan thresholds must lie in [0, 1]");
  }
  const double t = optimal_time_share(trace.stats());
  std::vector<RegionPoint> out;
  for (double m1 : mu_values) {
    for (double m2 : mu_values) {
      RegionPoint p;
      p.mu1 = m1;
      p.mu2 = m2;
      p.gamma = solve_gamma(m1, m2, t, trace, p_total, 1e-6);
      const ThresholdEvaluation e = evaluate_thresholds({m1, m2, p.gamma, t}, trace, p_total);
      p.residual_c1 = std::abs(e.residual_c1);
      p.residual_c2 = std::abs(e.residual_c2);
      p.sum_rate = e.sum_rate();
      p.boundary = m1 == 0.0 || m1 == 1.0 || m2 == 0.0 || m2 == 1.0;
      p.feasible = p.residual_c1 <= tol_rate && p.residual_c2 <= tol_rate && p.sum_rate > 0.0;
      out.push_back(p);
    }
  }
  return out;
}

std::vector<PropertyResult> run_verification(const VerifyOptions& opts) {
  if (opts.draws < 1) throw ParameterError("verification needs at least one draw");
  std::vector<PropertyResult> out;
  for (Mode m : {Mode::uplink1, Mode::uplink2, Mode::multiple_access, Mode::broadcast}) {
    out.push_back(closed_form_property(m, opts));
  }
  out.push_back(broadcast_root_property(opts));
  out.push_back(t_boundary_property(opts));
  out.push_back(dominance_property(opts));
  out.push_back(symmetric_collapse_property(opts));
  out.push_back(scale_invariance_property(opts));
  out.push_back(power_monotone_property(opts));
  out.push_back(region_property(opts));
  return out;
}

}  // namespace bdrelay::oracle
