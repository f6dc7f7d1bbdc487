#pragma once

#include "bdrelay/channel.hpp"

namespace bdrelay {

/// C(x) = log2(1 + x) in bits/symbol. Throws DomainError for x < 0 or NaN.
double cap(double x);

/// Linear transmit powers of user 1, user 2 and the relay.
struct PowerTriple {
  double p1 = 0.0;
  double p2 = 0.0;
  double pr = 0.0;

  [[nodiscard]] double total() const { return p1 + p2 + pr; }
};

/// Instantaneous capacities of all links for one slot, in bits/symbol.
///
/// c12r and c21r split the multiple-access sum capacity cr_sum by successive
/// interference cancellation with time share t: for the first t of the slot
/// the relay decodes user 2 first, for the rest it decodes user 1 first.
struct LinkCapacities {
  double c1r = 0.0;
  double c2r = 0.0;
  double cr1 = 0.0;
  double cr2 = 0.0;
  double cr_sum = 0.0;
  double c12r = 0.0;
  double c21r = 0.0;
};

/// Throws DomainError when t is outside [0, 1] or a power is negative.
LinkCapacities link_capacities(const ChannelState& ch, const PowerTriple& powers,
                               double t);

}  // namespace bdrelay
