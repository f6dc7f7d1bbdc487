// Built with -mavx2 -ffp-contract=off; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cstdint>
#include <cstring>

#include "kernels/impl.hpp"
#include "kernels/slot_kernel.hpp"

namespace bdrelay::kernels::detail {
namespace {

// log(1 + x) for finite x >= 0, about 2 ulp.
inline __m256d log1p_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d u = _mm256_add_pd(one, x);
  // log1p(x) = log(u) + (x - (u - 1)) / u to first order.
  const __m256d corr = _mm256_div_pd(_mm256_sub_pd(x, _mm256_sub_pd(u, one)), u);

  const __m256i bits = _mm256_castpd_si256(u);
  const __m256i exp_field = _mm256_srli_epi64(bits, 52);  // u >= 1, sign bit clear
  const __m256i mant_bits =
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                      _mm256_set1_epi64x(0x3ff0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);  // [1, 2)

  // Exponent to double via the 2^52 trick.
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(exp_field, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));

  // Reduce m to [sqrt(1/2), sqrt(2)).
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, one));

  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d s = _mm256_mul_pd(f, f);
  __m256d poly = _mm256_set1_pd(1.0 / 23.0);
  for (double c : {1.0 / 21.0, 1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0, 1.0 / 11.0,
                   1.0 / 9.0, 1.0 / 7.0, 1.0 / 5.0, 1.0 / 3.0}) {
    poly = _mm256_add_pd(_mm256_mul_pd(poly, s), _mm256_set1_pd(c));
  }
  // log(m) = 2f + 2f s poly
  const __m256d twof = _mm256_add_pd(f, f);
  const __m256d logm = _mm256_add_pd(twof, _mm256_mul_pd(_mm256_mul_pd(twof, s), poly));

  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d tail = _mm256_add_pd(_mm256_add_pd(logm, _mm256_mul_pd(e, ln2_lo)), corr);
  return _mm256_add_pd(_mm256_mul_pd(e, ln2_hi), tail);
}

struct Avx2Lane {
  using V = __m256d;
  using M = __m256d;
  static V set1(double x) { return _mm256_set1_pd(x); }
  // maxpd returns its second operand when unordered; swap so NaN behaves like std::max.
  static V max(V a, V b) { return _mm256_max_pd(b, a); }
  static V sqrt(V a) { return _mm256_sqrt_pd(a); }
  static V log1p(V a) { return log1p_pd(a); }
  static M gt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
  static M ge(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
  static M lt(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
  static M ne(V a, V b) { return _mm256_cmp_pd(a, b, _CMP_NEQ_UQ); }
  static M both(M a, M b) { return _mm256_and_pd(a, b); }
  static V select(M m, V a, V b) { return _mm256_blendv_pd(b, a, m); }
};

constexpr std::size_t kWidth = 4;

template <bool T1, class Sink>
void run(const DualParams& p, const double* s1, const double* s2, std::size_t n, Sink&& sink) {
  const Coefficients<Avx2Lane> k(p);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    sink(i, kWidth, decide_lanes<Avx2Lane, T1>(_mm256_loadu_pd(s1 + i), _mm256_loadu_pd(s2 + i), k));
  }
  if (i < n) {
    alignas(32) double a[kWidth] = {0, 0, 0, 0};
    alignas(32) double b[kWidth] = {0, 0, 0, 0};
    std::memcpy(a, s1 + i, (n - i) * sizeof(double));
    std::memcpy(b, s2 + i, (n - i) * sizeof(double));
    sink(i, n - i, decide_lanes<Avx2Lane, T1>(_mm256_load_pd(a), _mm256_load_pd(b), k));
  }
}

struct Stored {
  alignas(32) double mode[kWidth], power[kWidth], in1[kWidth], in2[kWidth], r1[kWidth],
      r2[kWidth], obj[kWidth];
  explicit Stored(const SlotLanes<Avx2Lane>& r) {
    _mm256_store_pd(mode, r.mode);
    _mm256_store_pd(power, r.power);
    _mm256_store_pd(in1, r.ingress1);
    _mm256_store_pd(in2, r.ingress2);
    _mm256_store_pd(r1, r.relay1);
    _mm256_store_pd(r2, r.relay2);
    _mm256_store_pd(obj, r.objective);
  }
};

template <bool T1>
SlotSums accumulate_impl(const DualParams& p, const double* s1, const double* s2,
                         std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d in1 = zero, in2 = zero, r1 = zero, r2 = zero, pw = zero, obj = zero;
  SlotSums sums;
  run<T1>(p, s1, s2, n, [&](std::size_t, std::size_t count, const SlotLanes<Avx2Lane>& r) {
    if (count == kWidth) {
      in1 = _mm256_add_pd(in1, r.ingress1);
      in2 = _mm256_add_pd(in2, r.ingress2);
      r1 = _mm256_add_pd(r1, r.relay1);
      r2 = _mm256_add_pd(r2, r.relay2);
      pw = _mm256_add_pd(pw, r.power);
      obj = _mm256_add_pd(obj, r.objective);
      alignas(32) double mode[kWidth];
      _mm256_store_pd(mode, r.mode);
      for (double m : mode) ++sums.mode_count[static_cast<std::size_t>(m) - 1];
      return;
    }
    const Stored st(r);
    for (std::size_t j = 0; j < count; ++j) {
      sums.ingress1 += st.in1[j];
      sums.ingress2 += st.in2[j];
      sums.relay1 += st.r1[j];
      sums.relay2 += st.r2[j];
      sums.power += st.power[j];
      sums.objective += st.obj[j];
      ++sums.mode_count[static_cast<std::size_t>(st.mode[j]) - 1];
    }
  });
  auto hsum = [](__m256d v) {
    alignas(32) double x[kWidth];
    _mm256_store_pd(x, v);
    return (x[0] + x[1]) + (x[2] + x[3]);
  };
  sums.ingress1 += hsum(in1);
  sums.ingress2 += hsum(in2);
  sums.relay1 += hsum(r1);
  sums.relay2 += hsum(r2);
  sums.power += hsum(pw);
  sums.objective += hsum(obj);
  sums.slots = n;
  return sums;
}

template <bool T1>
void evaluate_impl(const DualParams& p, const double* s1, const double* s2, std::size_t n,
                   SlotColumns& out) {
  out.resize(n);
  run<T1>(p, s1, s2, n, [&](std::size_t i, std::size_t count, const SlotLanes<Avx2Lane>& r) {
    const Stored st(r);
    for (std::size_t j = 0; j < count; ++j) {
      out.mode[i + j] = static_cast<std::uint8_t>(st.mode[j]);
      out.power[i + j] = st.power[j];
      out.ingress1[i + j] = st.in1[j];
      out.ingress2[i + j] = st.in2[j];
      out.relay1[i + j] = st.r1[j];
      out.relay2[i + j] = st.r2[j];
      out.objective[i + j] = st.obj[j];
    }
  });
}

}  // namespace

SlotSums accumulate_avx2(const DualParams& p, const double* s1, const double* s2,
                         std::size_t n) {
  return p.t == 0.0 ? accumulate_impl<false>(p, s1, s2, n) : accumulate_impl<true>(p, s1, s2, n);
}

void evaluate_avx2(const DualParams& p, const double* s1, const double* s2, std::size_t n,
                   SlotColumns& out) {
  if (p.t == 0.0) {
    evaluate_impl<false>(p, s1, s2, n, out);
  } else {
    evaluate_impl<true>(p, s1, s2, n, out);
  }
}

}  // namespace bdrelay::kernels::detail
