#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include "bdrelay/error.hpp"
#include "kernels/impl.hpp"

namespace bdrelay::kernels {
namespace {

std::optional<Isa> g_override;

Isa detect() {
  if (const char* env = std::getenv("BDRELAY_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void check(const DualParams& p, std::span<const double> s1, std::span<const double> s2) {
  if (s1.size() != s2.size()) throw ParameterError("kernel: gain spans differ in length");
  if (p.t != 0.0 && p.t != 1.0) throw DomainError("kernel: time share must be 0 or 1");
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) {
    throw DomainError("kernel: gamma must be positive and finite");
  }
  if (!(p.mu1 >= 0.0 && p.mu1 <= 1.0) || !(p.mu2 >= 0.0 && p.mu2 <= 1.0)) {
    throw DomainError("kernel: mu1, mu2 must lie in [0, 1]");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if BDRELAY_HAVE_AVX2
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  if (g_override) return *g_override;
  static const Isa detected = detect();
  return detected;
}

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) throw ParameterError("kernel ISA not available on this machine");
  g_override = isa;
}

void SlotColumns::resize(std::size_t n) {
  mode.resize(n);
  power.resize(n);
  ingress1.resize(n);
  ingress2.resize(n);
  relay1.resize(n);
  relay2.resize(n);
  objective.resize(n);
}

SlotSums accumulate(const DualParams& params, std::span<const double> s1,
                    std::span<const double> s2, Isa isa) {
  check(params, s1, s2);
#if BDRELAY_HAVE_AVX2
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
    return detail::accumulate_avx2(params, s1.data(), s2.data(), s1.size());
  }
#endif
  (void)isa;
  return detail::accumulate_scalar(params, s1.data(), s2.data(), s1.size());
}

void evaluate(const DualParams& params, std::span<const double> s1, std::span<const double> s2,
              SlotColumns& out, Isa isa) {
  check(params, s1, s2);
#if BDRELAY_HAVE_AVX2
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
    detail::evaluate_avx2(params, s1.data(), s2.data(), s1.size(), out);
    return;
  }
#endif
  (void)isa;
  detail::evaluate_scalar(params, s1.data(), s2.data(), s1.size(), out);
}

}  // namespace bdrelay::kernels
