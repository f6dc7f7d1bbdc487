#include <algorithm>
#include <cmath>

#include "kernels/impl.hpp"
#include "kernels/slot_kernel.hpp"

namespace bdrelay::kernels::detail {
namespace {

struct ScalarLane {
  using V = double;
  using M = bool;
  static V set1(double x) { return x; }
  static V max(V a, V b) { return std::max(a, b); }
  static V sqrt(V a) { return std::sqrt(a); }
  static V log1p(V a) { return std::log1p(a); }
  static M gt(V a, V b) { return a > b; }
  static M ge(V a, V b) { return a >= b; }
  static M lt(V a, V b) { return a < b; }
  static M ne(V a, V b) { return a != b; }
  static M both(M a, M b) { return a && b; }
  static V select(M m, V a, V b) { return m ? a : b; }
};

template <bool T1>
SlotSums accumulate_impl(const DualParams& p, const double* s1, const double* s2,
                         std::size_t n) {
  const Coefficients<ScalarLane> k(p);
  SlotSums sums;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = decide_lanes<ScalarLane, T1>(s1[i], s2[i], k);
    sums.ingress1 += r.ingress1;
    sums.ingress2 += r.ingress2;
    sums.relay1 += r.relay1;
    sums.relay2 += r.relay2;
    sums.power += r.power;
    sums.objective += r.objective;
    ++sums.mode_count[static_cast<std::size_t>(r.mode) - 1];
  }
  sums.slots = n;
  return sums;
}

template <bool T1>
void evaluate_impl(const DualParams& p, const double* s1, const double* s2, std::size_t n,
                   SlotColumns& out) {
  const Coefficients<ScalarLane> k(p);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = decide_lanes<ScalarLane, T1>(s1[i], s2[i], k);
    out.mode[i] = static_cast<std::uint8_t>(r.mode);
    out.power[i] = r.power;
    out.ingress1[i] = r.ingress1;
    out.ingress2[i] = r.ingress2;
    out.relay1[i] = r.relay1;
    out.relay2[i] = r.relay2;
    out.objective[i] = r.objective;
  }
}

}  // namespace

SlotSums accumulate_scalar(const DualParams& p, const double* s1, const double* s2,
                           std::size_t n) {
  return p.t == 0.0 ? accumulate_impl<false>(p, s1, s2, n) : accumulate_impl<true>(p, s1, s2, n);
}

void evaluate_scalar(const DualParams& p, const double* s1, const double* s2, std::size_t n,
                     SlotColumns& out) {
  if (p.t == 0.0) {
    evaluate_impl<false>(p, s1, s2, n, out);
  } else {
    evaluate_impl<true>(p, s1, s2, n, out);
  }
}

}  // namespace bdrelay::kernels::detail
