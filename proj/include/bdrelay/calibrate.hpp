#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "bdrelay/channel.hpp"
#include "bdrelay/kernels.hpp"
#include "bdrelay/policy.hpp"

namespace bdrelay {

struct CalibrationConfig {
  FadingStatistics stats;
  double p_total = 1.0;  // linear, unit noise power
  std::size_t n_slots = 10000;
  std::uint64_t seed = 1;
  double tol_rate = 1e-2;
  double tol_power = 1e-2;
  int max_iters = 200;

  void validate() const;
};

/// Sample averages of one threshold triple over a trace, without queues:
/// relay rates count the full broadcast capacity.
struct ThresholdEvaluation {
  double r_1r = 0.0;
  double r_2r = 0.0;
  double r_r1 = 0.0;
  double r_r2 = 0.0;
  double avg_power = 0.0;
  std::array<double, 6> mode_freq{};
  double dual_value = 0.0;  // mean of max_k Lambda_k plus gamma * P_t

  // Signed relative residuals of the two rate-balance constraints and the
  // power budget.
  double residual_c1 = 0.0;  // (r_1r - r_r2) / max(r_r2, eps)
  double residual_c2 = 0.0;  // (r_2r - r_r1) / max(r_r1, eps)
  double residual_c3 = 0.0;  // (avg_power - P_t) / P_t

  [[nodiscard]] double sum_rate() const { return r_r1 + r_r2; }
};

/// Floor for relative-residual denominators.
inline constexpr double kResidualFloor = 1e-12;

ThresholdEvaluation evaluate_thresholds(const kernels::DualParams& params,
                                        const ChannelTrace& trace, double p_total);
ThresholdEvaluation evaluate_thresholds(const Thresholds& th, const ChannelTrace& trace,
                                        double p_total);
/// Samples the calibration trace from cfg (same seed every call).
ThresholdEvaluation evaluate_thresholds(const Thresholds& th, const CalibrationConfig& cfg);

struct CalibrationResult {
  Thresholds thresholds;
  double residual_c1 = 0.0;  // absolute values of the relative residuals
  double residual_c2 = 0.0;
  double residual_c3 = 0.0;
  int iterations = 0;
  bool converged = false;
  bool grid_restarted = false;
};

/// gamma such that the average consumed power equals p_total for fixed
/// (mu1, mu2). Average power is nonincreasing in gamma, so the root is
/// bracketed and refined in log(gamma).
double solve_gamma(double mu1, double mu2, double t, const ChannelTrace& trace,
                   double p_total, double rel_tol, double gamma_hint = 0.0);

CalibrationResult calibrate(const CalibrationConfig& cfg);
CalibrationResult calibrate(const CalibrationConfig& cfg, const ChannelTrace& trace);

}  // namespace bdrelay
