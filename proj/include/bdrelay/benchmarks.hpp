#pragma once

// Reference protocols for comparison: TDBC with and without power
// allocation, and fixed-power adaptive mode selection over all six modes or
// over {uplink1, uplink2, broadcast}. The fixed-power protocols reuse the
// selection-metric machinery of the proposed policy with the power penalty
// removed; they approximate the published selection rules rather than
// reproduce them.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "bdrelay/channel.hpp"
#include "bdrelay/engine.hpp"
#include "bdrelay/policy.hpp"

namespace bdrelay {

enum class BenchmarkKind { tdbc_no_pa, tdbc_pa, fixed_power_six_mode, fixed_power_three_mode };

std::string_view benchmark_name(BenchmarkKind kind);
std::optional<BenchmarkKind> parse_benchmark(std::string_view name);

struct BenchmarkConfig {
  BenchmarkKind kind = BenchmarkKind::tdbc_no_pa;
  double p_total = 1.0;
  // Per-node power of the fixed-power protocols; 0 means "scale so the
  // average consumed power equals p_total".
  double fixed_power = 0.0;
  // (mu1, mu2) for the fixed-power protocols; calibrated on the trace when absent.
  std::optional<std::pair<double, double>> thresholds;
  // Successive-decoding time share used by the fixed-power multiple-access mode.
  double time_share = 0.5;
  double tol_rate = 1e-3;
  double tol_power = 1e-3;
  // TDBC only: let the relay keep undelivered bits for later cycles.
  bool tdbc_buffered = false;

  void validate() const;
};

/// Fixed three-slot cycle: slot = 1 mod 3 uplink1, 2 mod 3 uplink2, 0 mod 3
/// broadcast. Without power allocation every active node sends at p_total;
/// with it each active link water-fills against one shared price gamma.
/// The relay is conventional by default: what a broadcast slot cannot
/// forward is lost, so each direction carries min(uplink, downlink) per cycle.
class TdbcProtocol final : public ProtocolPolicy {
 public:
  TdbcProtocol(bool power_allocation, double p_total, double gamma, bool buffered = false);

  [[nodiscard]] SlotDecision decide(const ChannelState& ch,
                                    const QueueState& queues) const override;
  [[nodiscard]] std::string name() const override;
  [[nodiscard]] bool relay_buffers() const override { return buffered_; }

  [[nodiscard]] static Mode scheduled_mode(std::uint64_t slot);
  [[nodiscard]] bool power_allocation() const { return power_allocation_; }
  [[nodiscard]] double gamma() const { return gamma_; }
  [[nodiscard]] double p_total() const { return p_total_; }

 private:
  bool power_allocation_;
  double p_total_;
  double gamma_;
  bool buffered_;
};

/// Builds the TDBC protocol; the PA variant bisects gamma on `trace` so the
/// average consumed power equals p_total.
TdbcProtocol tdbc_policy(const BenchmarkConfig& cfg, const ChannelTrace& trace);

struct FixedPowerCalibration {
  double mu1 = 0.5;
  double mu2 = 0.5;
  double power = 0.0;
  double residual_c1 = 0.0;  // |R1r - Rr2| / Rr2, unclipped
  double residual_c2 = 0.0;
  double residual_power = 0.0;
  bool converged = false;
};

/// Selection metrics at fixed node power: Lambda_k without the power term.
std::array<double, 6> fixed_power_metrics(const ChannelState& ch, double power, double mu1,
                                          double mu2, double t);

class FixedPowerProtocol final : public ProtocolPolicy {
 public:
  FixedPowerProtocol(bool six_mode, double power, double mu1, double mu2, double t);

  [[nodiscard]] SlotDecision decide(const ChannelState& ch,
                                    const QueueState& queues) const override;
  [[nodiscard]] std::string name() const override;

  [[nodiscard]] bool six_mode() const { return six_mode_; }
  [[nodiscard]] double power() const { return power_; }
  [[nodiscard]] double mu1() const { return mu1_; }
  [[nodiscard]] double mu2() const { return mu2_; }
  [[nodiscard]] const FixedPowerCalibration& calibration() const { return calibration_; }
  void set_calibration(const FixedPowerCalibration& c) { calibration_ = c; }

 private:
  bool six_mode_;
  double power_;
  double mu1_;
  double mu2_;
  double t_;
  FixedPowerCalibration calibration_;
};

/// Builds a fixed-power selection protocol, calibrating (mu1, mu2) for rate
/// balance and the node power for the budget on `trace` where needed.
FixedPowerProtocol fixed_power_policy(const BenchmarkConfig& cfg, const ChannelTrace& trace);

}  // namespace bdrelay
