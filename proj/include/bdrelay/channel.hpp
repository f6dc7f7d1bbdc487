#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace bdrelay {

/// Means of the squared channel gains S1 (user 1 <-> relay) and S2 (user 2 <-> relay).
struct FadingStatistics {
  double omega1 = 1.0;
  double omega2 = 1.0;

  /// Throws ParameterError unless both means are strictly positive and finite.
  void validate() const;
};

/// Squared gains of one block-fading slot. Slots are numbered from 1.
struct ChannelState {
  std::uint64_t slot = 1;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Lazy generator of i.i.d. Rayleigh-fading slots (exponential squared gains).
///
/// Uses std::mt19937_64, whose output sequence is fixed by the standard, and
/// maps each 64-bit draw to a uniform in [0, 1) with 53 bits before applying
/// the exponential inverse CDF. Per slot, S1 is drawn before S2.
class TraceStream {
 public:
  TraceStream(const FadingStatistics& stats, std::uint64_t seed);

  ChannelState next();

 private:
  double exponential(double mean);

  FadingStatistics stats_;
  std::mt19937_64 rng_;
  std::uint64_t slot_ = 0;
};

/// Materialized channel realization, stored column-wise for the batch kernels.
class ChannelTrace {
 public:
  ChannelTrace(const FadingStatistics& stats, std::uint64_t seed,
               std::vector<double> s1, std::vector<double> s2);

  /// Builds a trace from explicit states; slots must run 1..N without gaps.
  static ChannelTrace from_states(const FadingStatistics& stats,
                                  const std::vector<ChannelState>& states);

  [[nodiscard]] std::size_t size() const { return s1_.size(); }
  [[nodiscard]] bool empty() const { return s1_.empty(); }
  [[nodiscard]] ChannelState operator[](std::size_t i) const {
    return {static_cast<std::uint64_t>(i + 1), s1_[i], s2_[i]};
  }

  [[nodiscard]] const FadingStatistics& stats() const { return stats_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::span<const double> s1() const { return s1_; }
  [[nodiscard]] std::span<const double> s2() const { return s2_; }

 private:
  FadingStatistics stats_;
  std::uint64_t seed_ = 0;
  std::vector<double> s1_;
  std::vector<double> s2_;
};

ChannelTrace sample_trace(const FadingStatistics& stats, std::size_t n_slots,
                          std::uint64_t seed);

/// Arithmetic means of (s1, s2) over the trace.
std::pair<double, double> empirical_means(const ChannelTrace& trace);

/// Debug dump with columns slot,s1,s2.
void write_trace_csv(const ChannelTrace& trace, std::ostream& out);

}  // namespace bdrelay
