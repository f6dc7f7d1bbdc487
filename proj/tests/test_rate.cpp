#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bdrelay/error.hpp"
#include "bdrelay/rate.hpp"

using namespace bdrelay;

TEST_CASE("cap on exact powers of two") {
  CHECK(cap(0.0) == 0.0);
  CHECK(cap(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cap(3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cap(1e-300) > 0.0);
  CHECK_THROWS_AS(cap(-1e-12), DomainError);
  CHECK_THROWS_AS(cap(NAN), DomainError);
}

TEST_CASE("successive decoding split") {
  const auto c = link_capacities({1, 1.0, 7.0}, {1.0, 5.0, 0.0}, 1.0);
  CHECK(c.c12r == doctest::Approx(1.0));

  const auto z = link_capacities({1, 2.0, 3.0}, {0.0, 0.0, 1.5}, 0.5);
  CHECK(z.c1r == 0.0);
  CHECK(z.c2r == 0.0);
  CHECK(z.cr_sum == 0.0);
  CHECK(z.c12r == 0.0);
  CHECK(z.c21r == 0.0);
  CHECK(z.cr1 == doctest::Approx(cap(3.0)));
  CHECK(z.cr2 == doctest::Approx(cap(4.5)));

  const auto m = link_capacities({1, 3.0, 1.0}, {1.0, 1.0, 0.0}, 0.0);
  CHECK(m.c12r == doctest::Approx(std::log2(2.5)));
  CHECK(m.c21r == doctest::Approx(1.0));
  CHECK(m.c12r + m.c21r == doctest::Approx(std::log2(5.0)));
}

TEST_CASE("split sums to the multiple-access capacity") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const ChannelState ch{1, ex(rng), ex(rng)};
    const PowerTriple p{10 * ex(rng), 10 * ex(rng), 0.0};
    const auto c = link_capacities(ch, p, u(rng));
    CHECK(std::abs(c.c12r + c.c21r - c.cr_sum) <= 1e-9);
  }
}

TEST_CASE("invalid time share or power") {
  CHECK_THROWS_AS(link_capacities({1, 1, 1}, {1, 1, 0}, 1.5), DomainError);
  CHECK_THROWS_AS(link_capacities({1, 1, 1}, {1, 1, 0}, -0.1), DomainError);
  CHECK_THROWS_AS(link_capacities({1, 1, 1}, {-1, 1, 0}, 0.0), DomainError);
}
