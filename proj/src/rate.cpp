#include "bdrelay/rate.hpp"

#include <cmath>
#include <numbers>

#include "bdrelay/error.hpp"

namespace bdrelay {

double cap(double x) {
  if (!(x >= 0.0)) throw DomainError("cap: argument must be nonnegative");
  return std::log1p(x) / std::numbers::ln2;
}

LinkCapacities link_capacities(const ChannelState& ch, const PowerTriple& powers, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("time share must lie in [0, 1]");
  if (!(powers.p1 >= 0.0) || !(powers.p2 >= 0.0) || !(powers.pr >= 0.0)) {
    throw DomainError("transmit powers must be nonnegative");
  }
  const double x1 = powers.p1 * ch.s1;
  const double x2 = powers.p2 * ch.s2;

  LinkCapacities c;
  c.c1r = cap(x1);
  c.c2r = cap(x2);
  c.cr1 = cap(powers.pr * ch.s1);
  c.cr2 = cap(powers.pr * ch.s2);
  c.cr_sum = cap(x1 + x2);
  c.c12r = t * c.c1r + (1.0 - t) * cap(x1 / (1.0 + x2));
  c.c21r = (1.0 - t) * c.c2r + t * cap(x2 / (1.0 + x1));
  return c;
}

}  // namespace bdrelay
