#include "bdrelay/channel.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "bdrelay/error.hpp"

namespace bdrelay {

void FadingStatistics::validate() const {
  if (!(omega1 > 0.0) || !(omega2 > 0.0) || !std::isfinite(omega1) ||
      !std::isfinite(omega2)) {
    throw ParameterError("fading means must be positive and finite (omega1=" +
                         std::to_string(omega1) + ", omega2=" + std::to_string(omega2) + ")");
  }
}

TraceStream::TraceStream(const FadingStatistics& stats, std::uint64_t seed)
    : stats_(stats), rng_(seed) {
  stats_.validate();
}

double TraceStream::exponential(double mean) {
  // 53 high bits -> uniform in [0, 1); -log(1 - u) is exponential(1).
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return -mean * std::log1p(-u);
}

ChannelState TraceStream::next() {
  ChannelState ch;
  ch.slot = ++slot_;
  ch.s1 = exponential(stats_.omega1);
  ch.s2 = exponential(stats_.omega2);
  return ch;
}

ChannelTrace::ChannelTrace(const FadingStatistics& stats, std::uint64_t seed,
                           std::vector<double> s1, std::vector<double> s2)
    : stats_(stats), seed_(seed), s1_(std::move(s1)), s2_(std::move(s2)) {
  stats_.validate();
  if (s1_.size() != s2_.size()) throw ParameterError("trace columns differ in length");
  for (std::size_t i = 0; i < s1_.size(); ++i) {
    if (!(s1_[i] >= 0.0) || !(s2_[i] >= 0.0) || !std::isfinite(s1_[i]) ||
        !std::isfinite(s2_[i])) {
      throw ParameterError("channel gains must be finite and nonnegative (slot " +
                           std::to_string(i + 1) + ")");
    }
  }
}

ChannelTrace ChannelTrace::from_states(const FadingStatistics& stats,
                                       const std::vector<ChannelState>& states) {
  std::vector<double> s1;
  std::vector<double> s2;
  s1.reserve(states.size());
  s2.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].slot != i + 1) throw ParameterError("trace slots must run 1..N without gaps");
    s1.push_back(states[i].s1);
    s2.push_back(states[i].s2);
  }
  return ChannelTrace(stats, 0, std::move(s1), std::move(s2));
}

ChannelTrace sample_trace(const FadingStatistics& stats, std::size_t n_slots,
                          std::uint64_t seed) {
  stats.validate();
  if (n_slots < 1) throw ParameterError("n_slots must be at least 1");
  TraceStream stream(stats, seed);
  std::vector<double> s1(n_slots);
  std::vector<double> s2(n_slots);
  for (std::size_t i = 0; i < n_slots; ++i) {
    const ChannelState ch = stream.next();
    s1[i] = ch.s1;
    s2[i] = ch.s2;
  }
  return ChannelTrace(stats, seed, std::move(s1), std::move(s2));
}

std::pair<double, double> empirical_means(const ChannelTrace& trace) {
  if (trace.empty()) throw ParameterError("empirical_means of an empty trace");
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    a += trace.s1()[i];
    b += trace.s2()[i];
  }
  const auto n = static_cast<double>(trace.size());
  return {a / n, b / n};
}

void write_trace_csv(const ChannelTrace& trace, std::ostream& out) {
  out << "slot,s1,s2\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const ChannelState ch = trace[i];
    out << ch.slot << ',' << ch.s1 << ',' << ch.s2 << '\n';
  }
  out.precision(old_precision);
}

}  // namespace bdrelay
