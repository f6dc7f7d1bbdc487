#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "bdrelay/channel.hpp"
#include "bdrelay/rate.hpp"

namespace bdrelay {

/// The six half-duplex transmission modes of the two-way relay network.
enum class Mode : std::uint8_t {
  uplink1 = 1,         // user 1 -> relay
  uplink2 = 2,         // user 2 -> relay
  multiple_access = 3, // both users -> relay
  downlink1 = 4,       // relay -> user 1 (data of user 2)
  downlink2 = 5,       // relay -> user 2 (data of user 1)
  broadcast = 6,       // relay -> both users
};

constexpr int index_of(Mode m) { return static_cast<int>(m); }
Mode mode_from_index(int k);
std::string_view mode_name(Mode m);

/// Dual variables: mu1, mu2 price the two rate-balance constraints, gamma
/// prices the total average power budget.
struct Thresholds {
  double mu1 = 0.5;
  double mu2 = 0.5;
  double gamma = 1.0;

  /// Throws ParameterError unless 0 < mu1, mu2 < 1 and gamma > 0.
  void validate() const;
};

/// Per-mode optimal transmit powers for one slot.
struct ModePowers {
  double p1_m1 = 0.0;
  double p2_m2 = 0.0;
  double p1_m3 = 0.0;
  double p2_m3 = 0.0;
  double pr_m4 = 0.0;
  double pr_m5 = 0.0;
  double pr_m6 = 0.0;
};

/// Selection metrics Lambda_1..Lambda_6, each evaluated at its mode's optimal
/// powers.
struct SelectionMetrics {
  std::array<double, 6> lambda{};

  [[nodiscard]] double operator[](Mode m) const { return lambda[index_of(m) - 1]; }
};

struct SlotDecision {
  Mode mode = Mode::uplink1;
  PowerTriple powers;  // zero for nodes that do not transmit in `mode`
  double t = 0.0;
  LinkCapacities rates;
};

/// Time share for multiple access: 0 when omega1 >= omega2, else 1.
double optimal_time_share(const FadingStatistics& stats);

/// Single-link water level [weight / (gamma ln 2) - 1/s]^+; zero when s <= 0.
double water_fill(double weight, double gamma, double s);

/// Relay broadcast power maximizing mu1 C(p s2) + mu2 C(p s1) - gamma p, i.e.
/// the nonnegative root of mu2 s1/(1+p s1) + mu1 s2/(1+p s2) = gamma ln 2.
double broadcast_power(double s1, double s2, double mu1, double mu2, double gamma);

struct MacPowers {
  double p1 = 0.0;
  double p2 = 0.0;
};

/// Maximizer of the multiple-access metric at a boundary time share t in
/// {0, 1}. Both powers positive gives the joint stationary point; otherwise
/// the mode collapses onto single-user water-filling. All KKT candidates are
/// compared, so the result is the global maximizer for any (mu1, mu2).
MacPowers mac_powers(double s1, double s2, double mu1, double mu2, double gamma,
                     double t);

/// (1-mu1) C12r + (1-mu2) C21r - gamma (p1 + p2).
double mac_metric(double s1, double s2, double mu1, double mu2, double gamma, double t,
                  double p1, double p2);

ModePowers mode_powers(const ChannelState& ch, const Thresholds& th,
                       const FadingStatistics& stats);

SelectionMetrics selection_metrics(const ChannelState& ch, const Thresholds& th,
                                   const ModePowers& mp, double t);

/// Argmax over modes {1, 2, 3, 6}; ties go to the lowest index. Modes 4 and 5
/// are dominated by the broadcast mode and are never returned. Throws
/// ComputationError on a NaN metric.
Mode select_mode(const SelectionMetrics& metrics);

SlotDecision decide_slot(const ChannelState& ch, const Thresholds& th,
                         const FadingStatistics& stats);

}  // namespace bdrelay
