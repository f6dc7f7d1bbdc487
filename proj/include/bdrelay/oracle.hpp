#pragma once

// Brute-force checks of the closed-form policy, used by the test suites and
// by the `verify` subcommand. Nothing here calls the closed-form powers: the
// metrics are evaluated straight from their definitions and maximized by
// exhaustive search.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdrelay/channel.hpp"
#include "bdrelay/policy.hpp"

namespace bdrelay::oracle {

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2000;

  void validate() const;
  [[nodiscard]] double step() const { return (hi - lo) / static_cast<double>(points - 1); }
  [[nodiscard]] double at(std::size_t i) const { return lo + step() * static_cast<double>(i); }
};

/// Selection metric of `mode` at explicit powers. For modes 1 and 3, p1 is
/// user 1's power; for mode 2 (and the second user of mode 3) p2 is used; the
/// relay modes 4-6 read p1 as the relay power.
double metric_at(Mode mode, const ChannelState& ch, const Thresholds& th, double t,
                 double p1, double p2);

/// Search range beyond which the linear power penalty dominates any
/// logarithmic capacity gain.
GridSpec default_grid(Mode mode, const ChannelState& ch, const Thresholds& th,
                      std::size_t points = 2000);

struct GridMax {
  double p1 = 0.0;
  double p2 = 0.0;
  double metric = 0.0;
};

/// Exhaustive grid maximization of the metric. Mode 3 searches the product
/// grid over (p1, p2), with `second` as the p2 axis when given.
GridMax grid_max_metric(Mode mode, const ChannelState& ch, const Thresholds& th, double t,
                        const GridSpec& grid, const std::optional<GridSpec>& second = {});

struct TSweep {
  std::vector<double> t;
  std::vector<double> metric;
  double argmax_t = 0.0;
  double max_metric = 0.0;
};

/// Multiple-access metric over a uniform t grid at fixed powers.
TSweep t_sweep(const ChannelState& ch, const Thresholds& th, double p1, double p2,
               std::size_t points);

struct RegionPoint {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double gamma = 0.0;
  double residual_c1 = 0.0;  // absolute relative residuals
  double residual_c2 = 0.0;
  double sum_rate = 0.0;     // unclipped relay rates
  bool boundary = false;
  bool feasible = false;     // both residuals within tolerance and positive sum rate
};

/// Evaluates the rate-balance residuals over a (mu1, mu2) grid that includes
/// the boundary values 0 and 1. At every point gamma is set so the power
/// budget binds.
std::vector<RegionPoint> threshold_region_scan(const ChannelTrace& trace, double p_total,
                                               const std::vector<double>& mu_values,
                                               double tol_rate);

struct PropertyResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::size_t draws = 1000;
  std::uint64_t seed = 7;
};

/// Runs the oracle property suite; one result per property.
std::vector<PropertyResult> run_verification(const VerifyOptions& opts);

}  // namespace bdrelay::oracle
