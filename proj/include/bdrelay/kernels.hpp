#pragma once

// Batch evaluation of the proposed per-slot policy over a channel trace.
//
// Calibration evaluates the same threshold triple over every slot of a fixed
// trace, hundreds of times. Slots are independent once queues are left out, so
// the work is data-parallel: a scalar reference kernel and an AVX2 kernel share
// one templated slot routine and are selected at runtime.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace bdrelay::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

/// Best available ISA, unless overridden by set_active_isa() or the
/// BDRELAY_ISA environment variable ("scalar" or "avx2").
Isa active_isa();
void set_active_isa(Isa isa);

/// Unchecked dual parameters. mu1 and mu2 may sit on the closed interval
/// [0, 1] so boundary scans can use the same kernels; gamma must be positive
/// and t must be 0 or 1.
struct DualParams {
  double mu1 = 0.5;
  double mu2 = 0.5;
  double gamma = 1.0;
  double t = 0.0;
};

/// Sums over slots of the quantities the calibration needs. Relay rates are
/// unclipped capacities of the broadcast slots (no queue constraint).
struct SlotSums {
  double ingress1 = 0.0;
  double ingress2 = 0.0;
  double relay1 = 0.0;
  double relay2 = 0.0;
  double power = 0.0;
  double objective = 0.0;  // sum of max_k Lambda_k
  std::array<std::uint64_t, 6> mode_count{};
  std::size_t slots = 0;
};

/// Per-slot outputs, one entry per slot.
struct SlotColumns {
  std::vector<std::uint8_t> mode;
  std::vector<double> power;
  std::vector<double> ingress1;
  std::vector<double> ingress2;
  std::vector<double> relay1;
  std::vector<double> relay2;
  std::vector<double> objective;

  void resize(std::size_t n);
};

SlotSums accumulate(const DualParams& params, std::span<const double> s1,
                    std::span<const double> s2, Isa isa = active_isa());

void evaluate(const DualParams& params, std::span<const double> s1,
              std::span<const double> s2, SlotColumns& out, Isa isa = active_isa());

}  // namespace bdrelay::kernels
