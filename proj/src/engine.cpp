#include "bdrelay/engine.hpp"

#include <algorithm>
#include <cmath>

#include "bdrelay/error.hpp"

namespace bdrelay {

namespace {

constexpr double kUnitsPerBit = 0x1.0p32;

struct UnitQueues {
  std::int64_t q1 = 0;
  std::int64_t q2 = 0;
};

struct UnitDelivery {
  std::int64_t in1 = 0;
  std::int64_t in2 = 0;
  std::int64_t out1 = 0;  // relay -> user 1, drains q2
  std::int64_t out2 = 0;  // relay -> user 2, drains q1
};

UnitDelivery apply(UnitQueues& q, const SlotDecision& d) {
  UnitDelivery u;
  const LinkCapacities& c = d.rates;
  switch (d.mode) {
    case Mode::uplink1: u.in1 = to_units(c.c1r); break;
    case Mode::uplink2: u.in2 = to_units(c.c2r); break;
    case Mode::multiple_access:
      u.in1 = to_units(c.c12r);
      u.in2 = to_units(c.c21r);
      break;
    case Mode::downlink1: u.out1 = std::min(to_units(c.cr1), q.q2); break;
    case Mode::downlink2: u.out2 = std::min(to_units(c.cr2), q.q1); break;
    case Mode::broadcast:
      u.out1 = std::min(to_units(c.cr1), q.q2);
      u.out2 = std::min(to_units(c.cr2), q.q1);
      break;
  }
  q.q1 += u.in1 - u.out2;
  q.q2 += u.in2 - u.out1;
  if (q.q1 < 0 || q.q2 < 0) throw ComputationError("relay buffer went negative");
  return u;
}

std::int64_t queue_units(double q) {
  if (!(q >= 0.0)) throw ParameterError("queue contents must be nonnegative");
  return to_units(q);
}

}  // namespace

std::int64_t to_units(double bits) {
  if (!(bits >= 0.0)) throw DomainError("bit amount must be nonnegative");
  const double u = std::floor(bits * kUnitsPerBit);
  if (u >= 0x1.0p62) throw DomainError("bit amount too large for the accounting grid");
  return static_cast<std::int64_t>(u);
}

double from_units(std::int64_t units) { return static_cast<double>(units) * kBitUnit; }

ProposedProtocol::ProposedProtocol(const Thresholds& th, const FadingStatistics& stats)
    : th_(th), stats_(stats) {
  th_.validate();
  stats_.validate();
}

SlotDecision ProposedProtocol::decide(const ChannelState& ch, const QueueState&) const {
  return decide_slot(ch, th_, stats_);
}

std::pair<QueueState, SlotDelivery> step(const QueueState& queues,
                                         const SlotDecision& decision) {
  UnitQueues q{queue_units(queues.q1), queue_units(queues.q2)};
  const UnitDelivery u = apply(q, decision);
  SlotDelivery out;
  out.r_1r = from_units(u.in1);
  out.r_2r = from_units(u.in2);
  out.r_r1 = from_units(u.out1);
  out.r_r2 = from_units(u.out2);
  return {QueueState{from_units(q.q1), from_units(q.q2)}, out};
}

RateReport run(const ChannelTrace& trace, const ProtocolPolicy& policy) {
  if (trace.empty()) throw ParameterError("cannot run on an empty trace");

  UnitQueues q;
  BitTotals tot;
  std::array<std::uint64_t, 6> counts{};
  double power = 0.0;
  double relay1_cap = 0.0;
  double relay2_cap = 0.0;

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const ChannelState ch = trace[i];
    const SlotDecision d = policy.decide(ch, QueueState{from_units(q.q1), from_units(q.q2)});
    const UnitDelivery u = apply(q, d);
    tot.ingress1 += u.in1;
    tot.ingress2 += u.in2;
    tot.delivered1 += u.out1;
    tot.delivered2 += u.out2;
    if (!policy.relay_buffers() && index_of(d.mode) >= index_of(Mode::downlink1)) {
      tot.dropped1 += q.q1;
      tot.dropped2 += q.q2;
      q = UnitQueues{};
    }
    ++counts[static_cast<std::size_t>(index_of(d.mode) - 1)];
    power += d.powers.total();
    if (d.mode == Mode::downlink1 || d.mode == Mode::broadcast) relay1_cap += d.rates.cr1;
    if (d.mode == Mode::downlink2 || d.mode == Mode::broadcast) relay2_cap += d.rates.cr2;
  }

  const double n = static_cast<double>(trace.size());
  RateReport r;
  r.n_slots = trace.size();
  r.r_1r = from_units(tot.ingress1) / n;
  r.r_2r = from_units(tot.ingress2) / n;
  r.r_r1 = from_units(tot.delivered1) / n;
  r.r_r2 = from_units(tot.delivered2) / n;
  r.sum_rate = r.r_r1 + r.r_r2;
  r.avg_power = power / n;
  for (std::size_t k = 0; k < 6; ++k) r.mode_freq[k] = static_cast<double>(counts[k]) / n;
  r.final_queues = QueueState{from_units(q.q1), from_units(q.q2)};
  r.r_r1_unclipped = relay1_cap / n;
  r.r_r2_unclipped = relay2_cap / n;
  r.totals = tot;
  return r;
}

}  // namespace bdrelay
