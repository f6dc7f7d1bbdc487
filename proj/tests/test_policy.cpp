#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bdrelay/error.hpp"
#include "bdrelay/policy.hpp"

using namespace bdrelay;

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Sampler {
  std::mt19937_64 rng{17};
  std::exponential_distribution<double> ex{1.0};
  std::uniform_real_distribution<double> mu{0.05, 0.95};
  std::uniform_real_distribution<double> lg{std::log(0.05), std::log(5.0)};

  ChannelState channel() { return {1, ex(rng), ex(rng)}; }
  Thresholds thresholds() { return {mu(rng), mu(rng), std::exp(lg(rng))}; }
};

}  // namespace

TEST_CASE("time share follows the fading ordering") {
  CHECK(optimal_time_share({2, 1}) == 0.0);
  CHECK(optimal_time_share({1, 5}) == 1.0);
  CHECK(optimal_time_share({1, 1}) == 0.0);
}

TEST_CASE("threshold validation") {
  CHECK_NOTHROW(Thresholds{0.3, 0.7, 2.0}.validate());
  CHECK_THROWS_AS((Thresholds{0.0, 0.5, 1.0}.validate()), ParameterError);
  CHECK_THROWS_AS((Thresholds{0.5, 1.0, 1.0}.validate()), ParameterError);
  CHECK_THROWS_AS((Thresholds{0.5, 0.5, 0.0}.validate()), ParameterError);
}

TEST_CASE("uplink water level") {
  const auto mp = mode_powers({1, 2.0, 1.0}, {0.5, 0.5, 0.5}, {1, 1});
  CHECK(mp.p1_m1 == doctest::Approx(1.0 / kLn2 - 0.5).epsilon(1e-12));
  CHECK(std::abs(mp.p1_m1 - 0.94270) < 1e-5);

  // (1 - mu1) / (gamma ln2) <= 1 / s1
  const auto clamped = mode_powers({1, 0.1, 1.0}, {0.9, 0.5, 1.0}, {1, 1});
  CHECK(clamped.p1_m1 == 0.0);
}

TEST_CASE("symmetric broadcast power") {
  for (double s : {0.3, 1.0, 4.0}) {
    const double mu = 0.4;
    const double g = 0.2;
    const auto mp = mode_powers({1, s, s}, {mu, mu, g}, {1, 1});
    const double expect = std::max(0.0, 2 * mu / (g * kLn2) - 1 / s);
    CHECK(mp.pr_m6 == doctest::Approx(expect).epsilon(1e-12));
    if (mp.pr_m6 > 0) CHECK(2 * mu * s / (1 + mp.pr_m6 * s) == doctest::Approx(g * kLn2));
  }
}

TEST_CASE("broadcast power is zero below the activation level") {
  // mu2 s1 + mu1 s2 <= gamma ln2
  CHECK(broadcast_power(0.5, 0.5, 0.5, 0.5, 1.0) == 0.0);
  CHECK(broadcast_power(0.0, 0.0, 0.5, 0.5, 1.0) == 0.0);
  CHECK(broadcast_power(5.0, 0.0, 0.5, 0.5, 0.1) > 0.0);
}

TEST_CASE("zero gains never crash") {
  const auto mp = mode_powers({1, 0.0, 0.0}, {0.5, 0.5, 1.0}, {1, 1});
  CHECK(mp.p1_m1 == 0.0);
  CHECK(mp.p2_m2 == 0.0);
  CHECK(mp.p1_m3 == 0.0);
  CHECK(mp.p2_m3 == 0.0);
  CHECK(mp.pr_m4 == 0.0);
  CHECK(mp.pr_m5 == 0.0);
  CHECK(mp.pr_m6 == 0.0);

  const auto d = decide_slot({1, 0.0, 0.0}, {0.5, 0.5, 1.0}, {1, 1});
  CHECK(d.mode == Mode::uplink1);
  CHECK(d.powers.total() == 0.0);
  CHECK(d.rates.c1r == 0.0);
  CHECK(d.rates.cr_sum == 0.0);
}

TEST_CASE("metrics at zero power vanish") {
  const SelectionMetrics m = selection_metrics({1, 1.0, 2.0}, {0.5, 0.5, 1.0}, ModePowers{}, 0.0);
  for (double v : m.lambda) CHECK(v == 0.0);
}

TEST_CASE("broadcast dominates the one-way downlinks") {
  Sampler s;
  for (int i = 0; i < 5000; ++i) {
    const ChannelState ch = s.channel();
    const Thresholds th = s.thresholds();
    const auto mp = mode_powers(ch, th, {1, 1});
    const auto m = selection_metrics(ch, th, mp, 0.0);
    CHECK(m[Mode::broadcast] >= m[Mode::downlink1] - 1e-12);
    CHECK(m[Mode::broadcast] >= m[Mode::downlink2] - 1e-12);
  }
}

TEST_CASE("equal thresholds collapse multiple access onto one user") {
  Sampler s;
  for (int i = 0; i < 2000; ++i) {
    const ChannelState ch = s.channel();
    Thresholds th = s.thresholds();
    th.mu2 = th.mu1;
    const auto mp = mode_powers(ch, th, {1, 1});
    CHECK((mp.p1_m3 == 0.0 || mp.p2_m3 == 0.0));
    const auto m = selection_metrics(ch, th, mp, 0.0);
    CHECK(m[Mode::multiple_access] <= std::max(m[Mode::uplink1], m[Mode::uplink2]) + 1e-9);
  }
}

TEST_CASE("multiple access powers beat every boundary candidate") {
  Sampler s;
  for (int i = 0; i < 2000; ++i) {
    const ChannelState ch = s.channel();
    const Thresholds th = s.thresholds();
    for (double t : {0.0, 1.0}) {
      const auto mac = mac_powers(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma, t);
      const double best = mac_metric(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma, t, mac.p1, mac.p2);
      const double only1 = water_fill(1 - th.mu1, th.gamma, ch.s1);
      const double only2 = water_fill(1 - th.mu2, th.gamma, ch.s2);
      CHECK(best >= mac_metric(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma, t, only1, 0) - 1e-12);
      CHECK(best >= mac_metric(ch.s1, ch.s2, th.mu1, th.mu2, th.gamma, t, 0, only2) - 1e-12);
      CHECK(best >= -1e-15);
    }
  }
}

TEST_CASE("argmax with lowest-index tie-break") {
  SelectionMetrics m;
  m.lambda = {0.5, 0.2, 0.3, 9.0, 9.0, 0.1};
  CHECK(select_mode(m) == Mode::uplink1);
  m.lambda = {1, 1, 1, 1, 1, 1};
  CHECK(select_mode(m) == Mode::uplink1);
  m.lambda = {0.1, 0.2, 0.3, 0.0, 0.0, 0.4};
  CHECK(select_mode(m) == Mode::broadcast);
  m.lambda = {0.1, 0.2, 0.2, 0.0, 0.0, 0.2};
  CHECK(select_mode(m) == Mode::uplink2);
  m.lambda = {0.1, NAN, 0.2, 0.0, 0.0, 0.2};
  CHECK_THROWS_AS(select_mode(m), ComputationError);
}

TEST_CASE("strong user 1 link never selects user 2 uplink") {
  Sampler s;
  for (int i = 0; i < 1000; ++i) {
    Thresholds th = s.thresholds();
    th.mu2 = th.mu1;
    const ChannelState ch{1, 50.0 + 10 * s.ex(s.rng), 0.01 * s.ex(s.rng)};
    const Mode m = decide_slot(ch, th, {1, 1}).mode;
    CHECK((m == Mode::uplink1 || m == Mode::broadcast));
  }
}

TEST_CASE("decision carries only the active node powers") {
  Sampler s;
  for (int i = 0; i < 2000; ++i) {
    const ChannelState ch = s.channel();
    const SlotDecision d = decide_slot(ch, s.thresholds(), {1, 2});
    CHECK(d.mode != Mode::downlink1);
    CHECK(d.mode != Mode::downlink2);
    CHECK(d.t == 1.0);
    switch (d.mode) {
      case Mode::uplink1: CHECK(d.powers.p2 + d.powers.pr == 0.0); break;
      case Mode::uplink2: CHECK(d.powers.p1 + d.powers.pr == 0.0); break;
      case Mode::multiple_access: CHECK(d.powers.pr == 0.0); break;
      default: CHECK(d.powers.p1 + d.powers.p2 == 0.0); break;
    }
  }
}

TEST_CASE("mode names and indices") {
  for (int k = 1; k <= 6; ++k) CHECK(index_of(mode_from_index(k)) == k);
  CHECK_THROWS(mode_from_index(0));
  CHECK_THROWS(mode_from_index(7));
  CHECK_FALSE(mode_name(Mode::broadcast).empty());
}
