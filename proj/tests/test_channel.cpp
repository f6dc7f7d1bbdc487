#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdrelay/channel.hpp"
#include "bdrelay/error.hpp"

using namespace bdrelay;

TEST_CASE("sample means track omega") {
  const auto tr = sample_trace({1.0, 1.0}, 10000, 3);
  const auto [m1, m2] = empirical_means(tr);
  CHECK(std::abs(m1 - 1.0) < 0.05);
  CHECK(std::abs(m2 - 1.0) < 0.05);

  const auto tr5 = sample_trace({5.0, 1.0}, 10000, 4);
  CHECK(std::abs(empirical_means(tr5).first - 5.0) < 0.25);
}

TEST_CASE("same seed gives a bit-identical trace") {
  const auto a = sample_trace({1.0, 2.0}, 500, 42);
  const auto b = sample_trace({1.0, 2.0}, 500, 42);
  const auto c = sample_trace({1.0, 2.0}, 500, 43);
  REQUIRE(a.size() == 500);
  CHECK(std::equal(a.s1().begin(), a.s1().end(), b.s1().begin()));
  CHECK(std::equal(a.s2().begin(), a.s2().end(), b.s2().begin()));
  CHECK_FALSE(std::equal(a.s1().begin(), a.s1().end(), c.s1().begin()));
}

TEST_CASE("streaming and materialized traces agree") {
  const auto tr = sample_trace({2.0, 0.5}, 300, 9);
  TraceStream st({2.0, 0.5}, 9);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const ChannelState ch = st.next();
    CHECK(ch.slot == i + 1);
    CHECK(ch.s1 == tr[i].s1);
    CHECK(ch.s2 == tr[i].s2);
  }
}

TEST_CASE("slots are numbered from 1 without gaps") {
  const auto tr = sample_trace({1.0, 1.0}, 10, 1);
  for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr[i].slot == i + 1);
  CHECK_THROWS_AS(ChannelTrace::from_states({1, 1}, {{1, 1, 1}, {3, 1, 1}}), ParameterError);
  const auto ok = ChannelTrace::from_states({1, 1}, {{1, 3, 5}});
  const auto [m1, m2] = empirical_means(ok);
  CHECK(m1 == 3.0);
  CHECK(m2 == 5.0);
}

TEST_CASE("constant trace mean") {
  std::vector<ChannelState> st;
  for (std::uint64_t i = 1; i <= 20; ++i) st.push_back({i, 2.0, 0.0});
  CHECK(empirical_means(ChannelTrace::from_states({1, 1}, st)).first == 2.0);
}

TEST_CASE("KS statistic below the 1% critical value") {
  const std::size_t n = 10000;
  for (double omega : {1.0, 3.0}) {
    const auto tr = sample_trace({omega, 1.0}, n, 11);
    std::vector<double> x(tr.s1().begin(), tr.s1().end());
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = 1.0 - std::exp(-x[i] / omega);
      d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("lag-1 autocorrelation is small") {
  const auto tr = sample_trace({1.0, 1.0}, 10000, 5);
  const auto s = tr.s1();
  const double mean = empirical_means(tr).first;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    den += (s[i] - mean) * (s[i] - mean);
    if (i + 1 < s.size()) num += (s[i] - mean) * (s[i + 1] - mean);
  }
  CHECK(std::abs(num / den) < 0.05);
}

TEST_CASE("invalid statistics and empty traces are rejected") {
  CHECK_THROWS_AS(sample_trace({0.0, 1.0}, 10, 1), ParameterError);
  CHECK_THROWS_AS(sample_trace({1.0, -1.0}, 10, 1), ParameterError);
  CHECK_THROWS_AS(sample_trace({1.0, 1.0}, 0, 1), ParameterError);
  CHECK_THROWS_AS(TraceStream({NAN, 1.0}, 1), ParameterError);
  const ChannelTrace empty({1, 1}, 0, {}, {});
  CHECK_THROWS_AS(empirical_means(empty), ParameterError);
  CHECK_THROWS_AS(ChannelTrace({1, 1}, 0, {-1.0}, {1.0}), ParameterError);
}

TEST_CASE("csv dump") {
  const auto tr = ChannelTrace::from_states({1, 1}, {{1, 0.5, 2}, {2, 1, 0.25}});
  std::ostringstream os;
  write_trace_csv(tr, os);
  CHECK(os.str().rfind("slot,s1,s2\n1,", 0) == 0);
}
