#include "bdrelay/calibrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bdrelay/error.hpp"
#include "log_root.hpp"

namespace bdrelay {

namespace {

// mu stays this far inside (0, 1) during the search.
constexpr double kMuMargin = 1e-6;
constexpr double kMaxStep = 0.25;
constexpr double kFdStep = 2e-3;
constexpr double kGridStep = 0.05;
// gamma is solved much tighter than tol_power so finite differences in mu
// see the rate response rather than root-finding noise.
constexpr double kGammaRelTol = 1e-10;

double rel(double num, double den) { return num / std::max(den, kResidualFloor); }

struct Point {
  double mu1 = 0.5;
  double mu2 = 0.5;
  double gamma = 1.0;
  ThresholdEvaluation eval;

  // Gradient of the dual function in (mu1, mu2).
  [[nodiscard]] std::array<double, 2> grad() const {
    return {eval.r_r2 - eval.r_1r, eval.r_r1 - eval.r_2r};
  }
};

class Search {
 public:
  Search(const CalibrationConfig& cfg, const ChannelTrace& trace)
      : cfg_(cfg), trace_(trace), t_(optimal_time_share(cfg.stats)) {}

  Point at(double mu1, double mu2, double gamma_hint) const {
    Point p;
    p.mu1 = mu1;
    p.mu2 = mu2;
    p.gamma = solve_gamma(mu1, mu2, t_, trace_, cfg_.p_total, kGammaRelTol, gamma_hint);
    p.eval = evaluate_thresholds(kernels::DualParams{mu1, mu2, p.gamma, t_}, trace_,
                                 cfg_.p_total);
    return p;
  }

  bool converged(const Point& p) const {
    return std::abs(p.eval.residual_c1) <= cfg_.tol_rate &&
           std::abs(p.eval.residual_c2) <= cfg_.tol_rate &&
           std::abs(p.eval.residual_c3) <= cfg_.tol_power;
  }

  static double rate_error(const Point& p) {
    return std::max(std::abs(p.eval.residual_c1), std::abs(p.eval.residual_c2));
  }

  // Damped Newton step on the dual gradient. Returns false when no step
  // improves on p.
  bool newton_step(Point& p) const {
    const auto g = p.grad();
    double jac[2][2];
    for (int j = 0; j < 2; ++j) {
      double mu[2] = {p.mu1, p.mu2};
      double h = kFdStep;
      if (mu[j] + h > 1.0 - kMuMargin) h = -h;
      mu[j] += h;
      const Point q = at(mu[0], mu[1], p.gamma);
      const auto gq = q.grad();
      jac[0][j] = (gq[0] - g[0]) / h;
      jac[1][j] = (gq[1] - g[1]) / h;
    }
    // The dual Hessian is symmetric positive semidefinite; clean up the
    // finite-difference estimate accordingly.
    const double a = jac[0][0];
    const double c = jac[1][1];
    const double b = 0.5 * (jac[0][1] + jac[1][0]);
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
    const double lmin = 0.5 * tr - disc;
    const double floor = 1e-6 * std::max(1.0, std::abs(tr));
    const double shift = lmin < floor ? floor - lmin : 0.0;
    const double a2 = a + shift;
    const double c2 = c + shift;
    const double det = a2 * c2 - b * b;
    if (!(det > 0.0) || !std::isfinite(det)) return false;
    double d1 = -(c2 * g[0] - b * g[1]) / det;
    double d2 = -(a2 * g[1] - b * g[0]) / det;
    const double len = std::max(std::abs(d1), std::abs(d2));
    if (len > kMaxStep) {
      d1 *= kMaxStep / len;
      d2 *= kMaxStep / len;
    }

    const double slope = g[0] * d1 + g[1] * d2;
    const double h0 = p.eval.dual_value;
    for (double alpha = 1.0; alpha >= 1.0 / 1024.0; alpha *= 0.5) {
      const double m1 = std::clamp(p.mu1 + alpha * d1, kMuMargin, 1.0 - kMuMargin);
      const double m2 = std::clamp(p.mu2 + alpha * d2, kMuMargin, 1.0 - kMuMargin);
      if (m1 == p.mu1 && m2 == p.mu2) break;
      Point q = at(m1, m2, p.gamma);
      if (q.eval.dual_value <= h0 + 1e-4 * alpha * slope) {
        p = q;
        return true;
      }
    }
    return false;
  }

  Point grid_restart(double gamma_hint) const {
    Point best;
    bool have = false;
    for (double m1 = kGridStep; m1 < 1.0 - 1e-9; m1 += kGridStep) {
      for (double m2 = kGridStep; m2 < 1.0 - 1e-9; m2 += kGridStep) {
        Point q = at(m1, m2, gamma_hint);
        if (!have || q.eval.dual_value < best.eval.dual_value) {
          best = q;
          have = true;
        }
      }
    }
    return best;
  }

 private:
  const CalibrationConfig& cfg_;
  const ChannelTrace& trace_;
  double t_;
};

CalibrationResult make_result(const Point& p, int iterations, bool converged, bool restarted) {
  CalibrationResult r;
  r.thresholds = Thresholds{p.mu1, p.mu2, p.gamma};
  r.residual_c1 = std::abs(p.eval.residual_c1);
  r.residual_c2 = std::abs(p.eval.residual_c2);
  r.residual_c3 = std::abs(p.eval.residual_c3);
  r.iterations = iterations;
  r.converged = converged;
  r.grid_restarted = restarted;
  return r;
}

}  // namespace

void CalibrationConfig::validate() const {
  stats.validate();
  if (!(p_total > 0.0) || !std::isfinite(p_total)) {
    throw ParameterError("p_total must be positive and finite");
  }
  if (n_slots < 1000) throw ParameterError("calibration needs at least 1000 slots");
  if (!(tol_rate > 0.0 && tol_rate <= 0.1) || !(tol_power > 0.0 && tol_power <= 0.1)) {
    throw ParameterError("calibration tolerances must lie in (0, 0.1]");
  }
  if (max_iters < 1) throw ParameterError("max_iters must be at least 1");
}

ThresholdEvaluation evaluate_thresholds(const kernels::DualParams& params,
                                        const ChannelTrace& trace, double p_total) {
  if (trace.empty()) throw ParameterError("cannot evaluate thresholds on an empty trace");
  if (!(p_total > 0.0)) throw ParameterError("p_total must be positive");
  const kernels::SlotSums s = kernels::accumulate(params, trace.s1(), trace.s2());
  const double n = static_cast<double>(s.slots);

  ThresholdEvaluation e;
  e.r_1r = s.ingress1 / n;
  e.r_2r = s.ingress2 / n;
  e.r_r1 = s.relay1 / n;
  e.r_r2 = s.relay2 / n;
  e.avg_power = s.power / n;
  for (std::size_t k = 0; k < 6; ++k) e.mode_freq[k] = static_cast<double>(s.mode_count[k]) / n;
  e.dual_value = s.objective / n + params.gamma * p_total;
  e.residual_c1 = rel(e.r_1r - e.r_r2, e.r_r2);
  e.residual_c2 = rel(e.r_2r - e.r_r1, e.r_r1);
  e.residual_c3 = (e.avg_power - p_total) / p_total;
  return e;
}

ThresholdEvaluation evaluate_thresholds(const Thresholds& th, const ChannelTrace& trace,
                                        double p_total) {
  th.validate();
  return evaluate_thresholds(
      kernels::DualParams{th.mu1, th.mu2, th.gamma, optimal_time_share(trace.stats())}, trace,
      p_total);
}

ThresholdEvaluation evaluate_thresholds(const Thresholds& th, const CalibrationConfig& cfg) {
  cfg.validate();
  return evaluate_thresholds(th, sample_trace(cfg.stats, cfg.n_slots, cfg.seed), cfg.p_total);
}

double solve_gamma(double mu1, double mu2, double t, const ChannelTrace& trace,
                   double p_total, double rel_tol, double gamma_hint) {
  if (trace.empty()) throw ParameterError("cannot solve for gamma on an empty trace");
  if (!(p_total > 0.0) || !std::isfinite(p_total)) throw ParameterError("p_total must be positive");
  if (!(rel_tol > 0.0)) throw ParameterError("rel_tol must be positive");

  auto excess = [&](double x) {
    const kernels::SlotSums s = kernels::accumulate(kernels::DualParams{mu1, mu2, std::exp(x), t},
                                                    trace.s1(), trace.s2());
    return s.power / static_cast<double>(s.slots) / p_total - 1.0;
  };

  // A single link water-filling at high power spends about 1/(gamma ln 2).
  const double x0 =
      gamma_hint > 0.0 ? std::log(gamma_hint) : -std::log(p_total * std::numbers::ln2);
  return std::exp(detail::solve_decreasing_log(excess, x0, rel_tol));
}

CalibrationResult calibrate(const CalibrationConfig& cfg) {
  cfg.validate();
  return calibrate(cfg, sample_trace(cfg.stats, cfg.n_slots, cfg.seed));
}

CalibrationResult calibrate(const CalibrationConfig& cfg, const ChannelTrace& trace) {
  cfg.validate();
  if (trace.empty()) throw ParameterError("cannot calibrate on an empty trace");
  const Search search(cfg, trace);

  Point p = search.at(0.5, 0.5, 0.0);
  Point best = p;
  bool restarted = false;
  int iters = 0;
  while (!search.converged(p) && iters < cfg.max_iters) {
    ++iters;
    if (!search.newton_step(p)) {
      if (restarted) break;
      restarted = true;
      p = search.grid_restart(p.gamma);
    }
    if (Search::rate_error(p) < Search::rate_error(best)) best = p;
  }
  if (search.converged(p)) return make_result(p, iters, true, restarted);
  return make_result(best, iters, search.converged(best), restarted);
}

}  // namespace bdrelay
