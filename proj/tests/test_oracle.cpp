#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bdrelay/oracle.hpp"

using namespace bdrelay;
using namespace bdrelay::oracle;

TEST_CASE("uplink grid maximum matches the water level") {
  const ChannelState ch{1, 2.0, 1.0};
  const Thresholds th{0.5, 0.5, 0.5};
  const GridSpec g = default_grid(Mode::uplink1, ch, th);
  const GridMax m = grid_max_metric(Mode::uplink1, ch, th, 0.0, g);
  CHECK(std::abs(m.p1 - 0.94270) <= g.step());
}

TEST_CASE("symmetric broadcast grid maximum") {
  const double s = 1.5;
  const Thresholds th{0.4, 0.4, 0.2};
  const ChannelState ch{1, s, s};
  const GridSpec g = default_grid(Mode::broadcast, ch, th);
  const GridMax m = grid_max_metric(Mode::broadcast, ch, th, 0.0, g);
  const double expect = 2 * 0.4 / (0.2 * std::numbers::ln2) - 1 / s;
  CHECK(std::abs(m.p1 - expect) <= g.step());
}

TEST_CASE("huge power price keeps every node silent") {
  const ChannelState ch{1, 1.0, 1.0};
  const Thresholds th{0.5, 0.5, 1e6};
  for (Mode mode : {Mode::uplink1, Mode::broadcast, Mode::multiple_access}) {
    GridSpec g{0.0, 10.0, 101};
    const GridMax m = grid_max_metric(mode, ch, th, 0.0, g, g);
    CHECK(m.p1 == 0.0);
    CHECK(m.p2 == 0.0);
  }
}

TEST_CASE("metric from definitions") {
  const ChannelState ch{1, 3.0, 1.0};
  const Thresholds th{0.25, 0.75, 0.1};
  CHECK(metric_at(Mode::uplink1, ch, th, 0.0, 1.0, 0.0) ==
        doctest::Approx(0.75 * 2.0 - 0.1));
  CHECK(metric_at(Mode::downlink1, ch, th, 0.0, 1.0, 0.0) ==
        doctest::Approx(0.75 * 2.0 - 0.1));
}

TEST_CASE("time-share profile follows the threshold ordering") {
  const ChannelState ch{1, 1.3, 0.7};
  auto sweep = t_sweep(ch, {0.7, 0.3, 0.5}, 1.0, 2.0, 101);
  CHECK(sweep.argmax_t == 0.0);
  CHECK(sweep.t.size() == 101);
  sweep = t_sweep(ch, {0.3, 0.7, 0.5}, 1.0, 2.0, 101);
  CHECK(sweep.argmax_t == 1.0);
  sweep = t_sweep(ch, {0.5, 0.5, 0.5}, 1.0, 2.0, 101);
  for (double v : sweep.metric) CHECK(std::abs(v - sweep.metric.front()) <= 1e-12);
}

TEST_CASE("boundary thresholds are infeasible") {
  const auto tr = sample_trace({1, 1}, 2000, 5);
  const auto pts = threshold_region_scan(tr, 10.0, {0.0, 0.25, 0.5, 0.75, 1.0}, 0.02);
  CHECK(pts.size() == 25);
  double best_boundary = INFINITY;
  double best_interior = INFINITY;
  for (const auto& p : pts) {
    const double r = std::max(p.residual_c1, p.residual_c2);
    if (p.boundary) {
      CHECK_FALSE(p.feasible);
      best_boundary = std::min(best_boundary, r);
    } else {
      best_interior = std::min(best_interior, r);
    }
    if (p.mu1 == 1.0) CHECK(p.residual_c1 == doctest::Approx(1.0));
  }
  CHECK(best_interior < best_boundary);
}

TEST_CASE("property suite passes") {
  const auto results = run_verification({200, 3});
  CHECK(results.size() >= 10);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
  }
}
