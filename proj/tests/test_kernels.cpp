#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"
#include "bdrelay/kernels.hpp"
#include "bdrelay/policy.hpp"

using namespace bdrelay;
namespace k = bdrelay::kernels;

namespace {

// Adds degenerate gains to an ordinary Rayleigh trace.
std::pair<std::vector<double>, std::vector<double>> gains(std::size_t n, std::uint64_t seed) {
  const auto tr = sample_trace({1.0, 2.0}, n, seed);
  std::vector<double> a(tr.s1().begin(), tr.s1().end());
  std::vector<double> b(tr.s2().begin(), tr.s2().end());
  a[0] = 0.0;
  b[1] = 0.0;
  a[2] = b[2] = 0.0;
  a[3] = 1e-9;
  b[4] = 1e6;
  a[5] = b[5] = 3.0;
  return {a, b};
}

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

}  // namespace

TEST_CASE("isa selection") {
  CHECK(k::isa_available(k::Isa::scalar));
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");
  const auto saved = k::active_isa();
  k::set_active_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::set_active_isa(saved);
}

TEST_CASE("scalar kernel reproduces decide_slot bit for bit") {
  const auto [a, b] = gains(1000, 5);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> mu(0.05, 0.95);
  for (int rep = 0; rep < 20; ++rep) {
    const Thresholds th{mu(rng), mu(rng), std::exp(std::uniform_real_distribution<double>(-3, 1.6)(rng))};
    const FadingStatistics stats{1.0, 2.0};
    const k::DualParams dp{th.mu1, th.mu2, th.gamma, optimal_time_share(stats)};
    k::SlotColumns cols;
    k::evaluate(dp, a, b, cols, k::Isa::scalar);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const SlotDecision d = decide_slot({i + 1, a[i], b[i]}, th, stats);
      REQUIRE(cols.mode[i] == index_of(d.mode));
      CHECK(same_bits(cols.power[i], d.powers.total()));
    }
  }
}

TEST_CASE("avx2 kernel matches the scalar reference") {
  if (!k::isa_available(k::Isa::avx2)) {
    MESSAGE("avx2 not available on this host");
    return;
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> mu(0.0, 1.0);
  for (std::size_t n : {1u, 3u, 4u, 7u, 1001u}) {
    const auto [a0, b0] = gains(std::max<std::size_t>(n, 6), n);
    const std::vector<double> a(a0.begin(), a0.begin() + n);
    const std::vector<double> b(b0.begin(), b0.begin() + n);
    for (int rep = 0; rep < 10; ++rep) {
      const k::DualParams dp{mu(rng), mu(rng), std::exp(std::uniform_real_distribution<double>(-4, 2)(rng)),
                             static_cast<double>(rep % 2)};
      k::SlotColumns cs, cv;
      k::evaluate(dp, a, b, cs, k::Isa::scalar);
      k::evaluate(dp, a, b, cv, k::Isa::avx2);
      for (std::size_t i = 0; i < n; ++i) {
        REQUIRE(cs.mode[i] == cv.mode[i]);
        CHECK(cv.power[i] == doctest::Approx(cs.power[i]).epsilon(1e-12));
        CHECK(std::abs(cv.ingress1[i] - cs.ingress1[i]) <= 1e-12 * (1 + cs.ingress1[i]));
        CHECK(std::abs(cv.ingress2[i] - cs.ingress2[i]) <= 1e-12 * (1 + cs.ingress2[i]));
        CHECK(std::abs(cv.relay1[i] - cs.relay1[i]) <= 1e-12 * (1 + cs.relay1[i]));
        CHECK(std::abs(cv.relay2[i] - cs.relay2[i]) <= 1e-12 * (1 + cs.relay2[i]));
        CHECK(std::abs(cv.objective[i] - cs.objective[i]) <= 1e-12 * (1 + std::abs(cs.objective[i])));
      }
      const auto ss = k::accumulate(dp, a, b, k::Isa::scalar);
      const auto sv = k::accumulate(dp, a, b, k::Isa::avx2);
      CHECK(ss.slots == n);
      CHECK(ss.mode_count == sv.mode_count);
      CHECK(sv.power == doctest::Approx(ss.power).epsilon(1e-11));
      CHECK(sv.relay1 == doctest::Approx(ss.relay1).epsilon(1e-11));
      CHECK(sv.ingress2 == doctest::Approx(ss.ingress2).epsilon(1e-11));
      CHECK(sv.objective == doctest::Approx(ss.objective).epsilon(1e-11));
    }
  }
}

TEST_CASE("accumulate agrees with evaluate") {
  const auto [a, b] = gains(500, 2);
  const k::DualParams dp{0.4, 0.6, 0.3, 1.0};
  k::SlotColumns c;
  k::evaluate(dp, a, b, c, k::Isa::scalar);
  const auto s = k::accumulate(dp, a, b, k::Isa::scalar);
  double p = 0.0;
  std::uint64_t m6 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    p += c.power[i];
    m6 += c.mode[i] == 6;
  }
  CHECK(s.power == doctest::Approx(p).epsilon(1e-12));
  CHECK(s.mode_count[5] == m6);
  CHECK(s.mode_count[3] == 0);
  CHECK(s.mode_count[4] == 0);
}

TEST_CASE("kernel argument checks") {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  CHECK_THROWS_AS(k::accumulate({0.5, 0.5, 1, 0}, a, b), ParameterError);
  const std::vector<double> c{1, 2, 3};
  CHECK_THROWS_AS(k::accumulate({0.5, 0.5, 0, 0}, a, c), DomainError);
  CHECK_THROWS_AS(k::accumulate({0.5, 0.5, 1, 0.5}, a, c), DomainError);
  CHECK_THROWS_AS(k::accumulate({1.5, 0.5, 1, 0}, a, c), DomainError);
  CHECK_NOTHROW(k::accumulate({0.0, 1.0, 1, 0}, a, c));
}
