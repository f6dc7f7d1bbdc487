#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>

#include "bdrelay/channel.hpp"
#include "bdrelay/policy.hpp"

namespace bdrelay {

/// Relay buffer contents in bits/symbol: q1 holds user 1's data, q2 user 2's.
struct QueueState {
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Rates realized in one slot.
struct SlotDelivery {
  double r_1r = 0.0;
  double r_2r = 0.0;
  double r_r1 = 0.0;
  double r_r2 = 0.0;
};

/// Exact bit accounting. Buffers are tracked as integers in units of
/// 2^-32 bit/symbol and capacities are rounded down onto that grid, so the
/// delivered totals can be compared with the ingested totals without
/// floating-point slack.
struct BitTotals {
  std::int64_t ingress1 = 0;
  std::int64_t ingress2 = 0;
  std::int64_t delivered1 = 0;  // relay -> user 1 (from buffer 2)
  std::int64_t delivered2 = 0;  // relay -> user 2 (from buffer 1)
  // Discarded by relays that do not buffer across slots (buffer 1, buffer 2).
  std::int64_t dropped1 = 0;
  std::int64_t dropped2 = 0;
};

inline constexpr double kBitUnit = 0x1.0p-32;

std::int64_t to_units(double bits);
double from_units(std::int64_t units);

struct RateReport {
  double r_1r = 0.0;
  double r_2r = 0.0;
  double r_r1 = 0.0;  // delivered
  double r_r2 = 0.0;  // delivered
  double sum_rate = 0.0;
  double avg_power = 0.0;
  std::array<double, 6> mode_freq{};
  QueueState final_queues;
  std::size_t n_slots = 0;

  // Relay rates at full capacity, ignoring buffer contents.
  double r_r1_unclipped = 0.0;
  double r_r2_unclipped = 0.0;
  BitTotals totals;
};

/// A protocol decides the mode and powers of each slot. It may look at the
/// buffers but must be deterministic given its configuration and inputs.
class ProtocolPolicy {
 public:
  virtual ~ProtocolPolicy() = default;
  [[nodiscard]] virtual SlotDecision decide(const ChannelState& ch,
                                            const QueueState& queues) const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
  /// False for conventional protocols whose relay forwards only what it
  /// received in the current cycle: after every relay-transmitting slot the
  /// engine discards whatever is left in the buffers.
  [[nodiscard]] virtual bool relay_buffers() const { return true; }
};

/// Adaptive mode selection and power allocation at fixed thresholds.
class ProposedProtocol final : public ProtocolPolicy {
 public:
  ProposedProtocol(const Thresholds& th, const FadingStatistics& stats);

  [[nodiscard]] SlotDecision decide(const ChannelState& ch,
                                    const QueueState& queues) const override;
  [[nodiscard]] std::string name() const override { return "proposed"; }
  [[nodiscard]] const Thresholds& thresholds() const { return th_; }

 private:
  Thresholds th_;
  FadingStatistics stats_;
};

/// Applies one slot's decision to the buffers. Rates are rounded down to the
/// 2^-32 accounting grid.
std::pair<QueueState, SlotDelivery> step(const QueueState& queues,
                                         const SlotDecision& decision);

/// Runs the protocol over the trace with empty initial buffers.
RateReport run(const ChannelTrace& trace, const ProtocolPolicy& policy);

}  // namespace bdrelay
