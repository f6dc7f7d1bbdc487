#pragma once

// One slot of the proposed policy, written once over a lane type L so the
// scalar reference and the SIMD variants run the same arithmetic in the same
// order. L provides:
//   V, M                      value and mask types
//   set1(x)                   broadcast
//   max(a, b)                 (a < b) ? b : a, matching std::max
//   sqrt(a), log1p(a)
//   gt/ge/lt/ne(a, b) -> M, both(m, n) -> M
//   select(m, a, b)           m ? a : b per lane
// Operators + - * / on V are the built-in ones (GCC vector extensions for the
// SIMD lanes).

#include <numbers>

#include "bdrelay/kernels.hpp"

namespace bdrelay::kernels::detail {

template <class L>
struct SlotLanes {
  typename L::V mode;
  typename L::V power;
  typename L::V ingress1;
  typename L::V ingress2;
  typename L::V relay1;
  typename L::V relay2;
  typename L::V objective;
};

template <class L>
struct Coefficients {
  typename L::V zero, one, two, four;
  typename L::V mu1, mu2, gamma, g;
  typename L::V w1, w2;  // 1 - mu1, 1 - mu2
  typename L::V mu_sum, dmu12, dmu21;  // mu1 + mu2, mu1 - mu2, mu2 - mu1
  typename L::V ln2;

  explicit Coefficients(const DualParams& p)
      : zero(L::set1(0.0)),
        one(L::set1(1.0)),
        two(L::set1(2.0)),
        four(L::set1(4.0)),
        mu1(L::set1(p.mu1)),
        mu2(L::set1(p.mu2)),
        gamma(L::set1(p.gamma)),
        g(L::set1(p.gamma * std::numbers::ln2)),
        w1(L::set1(1.0 - p.mu1)),
        w2(L::set1(1.0 - p.mu2)),
        mu_sum(L::set1(p.mu1 + p.mu2)),
        dmu12(L::set1(p.mu1 - p.mu2)),
        dmu21(L::set1(p.mu2 - p.mu1)),
        ln2(L::set1(std::numbers::ln2)) {}
};

template <class L>
inline typename L::V capacity(typename L::V x, const Coefficients<L>& k) {
  return L::log1p(x) / k.ln2;
}

template <class L, bool TimeShareOne>
inline SlotLanes<L> decide_lanes(typename L::V s1, typename L::V s2,
                                 const Coefficients<L>& k) {
  using V = typename L::V;
  using M = typename L::M;

  // Single-user water-filling; 1/s = inf clamps zero-gain slots to zero.
  const V p1 = L::max(k.zero, k.w1 / k.g - k.one / s1);
  const V p2 = L::max(k.zero, k.w2 / k.g - k.one / s2);
  const V c1 = capacity<L>(p1 * s1, k);
  const V c2 = capacity<L>(p2 * s2, k);
  const V lam1 = k.w1 * c1 - k.gamma * p1;
  const V lam2 = k.w2 * c2 - k.gamma * p2;

  // Broadcast: nonnegative root of a p^2 + b p + c = 0.
  const V a = k.g * s1 * s2;
  const V b = k.g * (s1 + s2) - k.mu_sum * s1 * s2;
  const V c = k.g - k.mu1 * s2 - k.mu2 * s1;
  const V sq = L::sqrt(L::max(k.zero, b * b - k.four * a * c));
  const V root_pos_b = (k.two * c) / (-b - sq);
  const V root_neg_b = (-b + sq) / (k.two * a);
  V pr = L::select(L::ge(b, k.zero), root_pos_b, root_neg_b);
  pr = L::select(L::lt(c, k.zero), L::max(pr, k.zero), k.zero);
  const V cr1 = capacity<L>(pr * s1, k);
  const V cr2 = capacity<L>(pr * s2, k);
  const V lam6 = k.mu1 * cr2 + k.mu2 * cr1 - k.gamma * pr;

  // Multiple access: joint stationary point, compared against the
  // single-user candidates (whose metrics are lam1 and lam2).
  V q1;
  V q2;
  if constexpr (!TimeShareOne) {
    const V d = s1 - s2;
    q2 = k.dmu12 * s1 / (k.g * d) - k.one / s2;
    q1 = k.w1 / k.g - k.dmu12 * s2 / (k.g * d);
  } else {
    const V d = s2 - s1;
    q1 = k.dmu21 * s2 / (k.g * d) - k.one / s1;
    q2 = k.w2 / k.g - k.dmu21 * s1 / (k.g * d);
  }
  const M joint_valid =
      L::both(L::both(L::gt(s1, k.zero), L::gt(s2, k.zero)),
              L::both(L::ne(s1, s2), L::both(L::gt(q1, k.zero), L::gt(q2, k.zero))));
  // Invalid lanes may hold inf/NaN; they are discarded by the selects below.
  const V x1 = q1 * s1;
  const V x2 = q2 * s2;
  V in1_joint;
  V in2_joint;
  if constexpr (!TimeShareOne) {
    in1_joint = capacity<L>(x1 / (k.one + x2), k);
    in2_joint = capacity<L>(x2, k);
  } else {
    in1_joint = capacity<L>(x1, k);
    in2_joint = capacity<L>(x2 / (k.one + x1), k);
  }
  const V lam3_joint = k.w1 * in1_joint + k.w2 * in2_joint - k.gamma * (q1 + q2);
  const V lam3_single = L::select(L::gt(lam2, lam1), lam2, lam1);
  const V lam3 = L::select(L::both(joint_valid, L::gt(lam3_joint, lam3_single)), lam3_joint,
                           lam3_single);

  // Argmax over modes 1, 2, 3, 6 with ties to the lowest index.
  SlotLanes<L> out;
  V best = lam1;
  V mode = k.one;
  V power = p1;
  V in1 = c1;
  V in2 = k.zero;
  V r1 = k.zero;
  V r2 = k.zero;

  M take = L::gt(lam2, best);
  best = L::select(take, lam2, best);
  mode = L::select(take, L::set1(2.0), mode);
  power = L::select(take, p2, power);
  in1 = L::select(take, k.zero, in1);
  in2 = L::select(take, c2, in2);

  // Mode 3 can only win strictly through the joint point.
  take = L::gt(lam3, best);
  best = L::select(take, lam3, best);
  mode = L::select(take, L::set1(3.0), mode);
  power = L::select(take, q1 + q2, power);
  in1 = L::select(take, in1_joint, in1);
  in2 = L::select(take, in2_joint, in2);

  take = L::gt(lam6, best);
  best = L::select(take, lam6, best);
  mode = L::select(take, L::set1(6.0), mode);
  power = L::select(take, pr, power);
  in1 = L::select(take, k.zero, in1);
  in2 = L::select(take, k.zero, in2);
  r1 = L::select(take, cr1, r1);
  r2 = L::select(take, cr2, r2);

  out.mode = mode;
  out.power = power;
  out.ingress1 = in1;
  out.ingress2 = in2;
  out.relay1 = r1;
  out.relay2 = r2;
  out.objective = best;
  return out;
}

}  // namespace bdrelay::kernels::detail
