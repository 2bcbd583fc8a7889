#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ellroll/errors.hpp"
#include "ellroll/metrics.hpp"

using namespace ellroll;

TEST_CASE("ise of constant error") {
  const std::vector<double> e(1000, 0.1);
  CHECK(ise(e, 0.01) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(ise(std::vector<double>{0.0, 1.0}, 1e-3) == doctest::Approx(1e-3));
}

TEST_CASE("itse weights by time") {
  CHECK(itse(std::vector<double>{1.0, 1.0}, 0.1) == doctest::Approx(0.01));
  // sum_{n=0}^{N-1} n dt * dt = dt^2 N (N - 1) / 2
  const std::vector<double> ones(101, 1.0);
  CHECK(itse(ones, 0.01) == doctest::Approx(1e-4 * 101 * 100 / 2));
  CHECK(itse(std::vector<double>{3.0}, 0.01) == 0.0);
}

TEST_CASE("ise and itse invariants") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> e(300);
  for (double& x : e) x = n(rng);
  std::vector<double> neg = e;
  for (double& x : neg) x = -x;
  CHECK(ise(e, 0.01) == ise(neg, 0.01));
  CHECK(ise(e, 0.01) >= 0.0);
  CHECK(itse(e, 0.01) <= ise(e, 0.01) * 299 * 0.01 + 1e-12);
  std::vector<double> scaled = e;
  for (double& x : scaled) x *= 2;
  CHECK(ise(scaled, 0.01) == doctest::Approx(4 * ise(e, 0.01)));
  CHECK_THROWS_AS((void)ise(e, 0.0), ConfigError);
}

TEST_CASE("settling time") {
  const double dt = 0.01;
  CHECK(settling_time(std::vector<double>{1.0, 1.0, 1.0}, 1.0, 0.031, dt) == 0.0);
  const auto t = settling_time(std::vector<double>{0.0, 0.5, 0.98, 1.1, 0.99, 1.0}, 1.0, 0.031, dt);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.04));
  CHECK_FALSE(settling_time(std::vector<double>{1.0, 1.0, 0.5}, 1.0, 0.031, dt).has_value());
  CHECK(*settling_time(std::vector<double>{0.5, 1.031}, 1.0, 0.031, dt) == doctest::Approx(0.01));
}

TEST_CASE("error band over the tail") {
  std::vector<double> th(100, 1.0);
  th[10] = 5.0;
  th[85] = 1.02;
  CHECK(error_band(th, 1.0) == doctest::Approx(0.02));
  CHECK(error_band(th, 1.0, 1.0) == doctest::Approx(4.0));
  CHECK(error_band(std::vector<double>{2.0}, 1.0) == 1.0);
  CHECK(error_band(std::vector<double>{0.0, 0.0, 0.0, 0.0, 0.5}, 0.0, 0.01) == 0.5);
}

TEST_CASE("evaluate from angles") {
  std::vector<double> th{0.0, 0.5, 1.0, 1.0};
  const MetricReport r = evaluate_metrics(th, 1.0, 0.01);
  CHECK(r.ise == doctest::Approx((1.0 + 0.25) * 0.01));
  CHECK(r.itse == doctest::Approx(0.01 * 0.25 * 0.01));
  CHECK(*r.settling_time == doctest::Approx(0.02));
  CHECK(r.error_band == 0.0);
  CHECK(r.samples == 4);
}

TEST_CASE("metric rows round trip") {
  MetricRow row{"run1", "rl", "h2v", 20, 34, 26, {}};
  row.report.ise = 1.25;
  row.report.itse = 0.5;
  row.report.error_band = 0.01;
  MetricRow unsettled = row;
  unsettled.method = "su";
  unsettled.report.settling_time = std::nullopt;
  row.report.settling_time = 1.5;
  std::stringstream ss;
  write_metric_rows(ss, {row, unsettled});
  std::string header;
  std::getline(ss, header);
  CHECK(header == kMetricHeader);
  ss.seekg(0);
  const auto back = read_metric_rows(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].report.ise == 1.25);
  CHECK(*back[0].report.settling_time == 1.5);
  CHECK_FALSE(back[1].report.settling_time.has_value());
  CHECK(back[1].method == "su");
  CHECK(back[1].semi_minor_mm == 26);
}

TEST_CASE("moving average") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto ma = moving_average(v, 2);
  CHECK(ma == std::vector<double>{1.0, 1.5, 2.5, 3.5, 4.5});
  CHECK(moving_average(v, 10).back() == 3.0);
  CHECK_THROWS_AS((void)moving_average(v, 0), ConfigError);
}
