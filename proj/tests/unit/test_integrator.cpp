#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ellroll/environment.hpp"
#include "ellroll/errors.hpp"
#include "ellroll/integrator.hpp"

using namespace ellroll;

namespace {
const EllipseParams kDefaults{};
}

TEST_CASE("equilibrium is a fixed point") {
  const BodyState s = step_physics(kDefaults, {0.0, 0.0}, 0.0, 1e-3);
  CHECK(s.theta == 0.0);
  CHECK(s.omega == 0.0);
  SimClock clock;
  const auto r = step_control(kDefaults, clock, {0.0, 0.0}, 0.0);
  CHECK(r.state.theta == 0.0);
  CHECK(r.state.omega == 0.0);
  CHECK(r.elapsed == doctest::Approx(0.010).epsilon(1e-15));
  CHECK(clock.physics_steps == 10);
}

TEST_CASE("small oscillation period matches the linearization") {
  const double k = kDefaults.mass * kDefaults.gravity *
                   (kDefaults.semi_major * kDefaults.semi_major - kDefaults.semi_minor * kDefaults.semi_minor) /
                   kDefaults.semi_minor;
  const double expected = 2 * kPi / std::sqrt(k / inertia(kDefaults, 0.0));
  CHECK(expected == doctest::Approx(0.497184919).epsilon(1e-8));

  BodyState s{0.01, 0.0};
  std::vector<double> crossings;  // downward zero crossings of theta, interpolated
  double t = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const BodyState next = step_physics(kDefaults, s, 0.0, 1e-3);
    if (s.theta > 0.0 && next.theta <= 0.0) crossings.push_back(t + 1e-3 * s.theta / (s.theta - next.theta));
    s = next;
    t += 1e-3;
  }
  REQUIRE(crossings.size() > 5);
  const double period = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  CHECK(std::abs(period - expected) / expected < 0.01);
}

TEST_CASE("free roll conserves energy") {
  BodyState s{kPi / 4, 0.0};
  const double e0 = total_energy(kDefaults, s);
  double worst = 0.0;
  for (int i = 0; i < 20480; ++i) {
    s = step_physics(kDefaults, s, 0.0, 1e-3);
    worst = std::max(worst, std::abs(total_energy(kDefaults, s) - e0) / e0);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("driven power balance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e-3, 1e-3);
  for (int seq = 0; seq < 10; ++seq) {
    SimClock clock;
    BodyState s{0.3 * seq, 0.0};
    const double e0 = total_energy(kDefaults, s);
    double work = 0.0;
    for (int i = 0; i < 300; ++i) {
      const auto r = step_control(kDefaults, clock, s, u(rng));
      work += r.work;
      s = r.state;
    }
    const double de = total_energy(kDefaults, s) - e0;
    CHECK(std::abs(de - work) / std::max(std::abs(de), 1e-6) < 1e-5);
  }
}

TEST_CASE("one step forward and back returns to the start") {
  const BodyState s0{0.8, 1.7};
  const BodyState fwd = step_physics(kDefaults, s0, 5e-4, 1e-3);
  const BodyState back = step_physics(kDefaults, fwd, 5e-4, -1e-3);
  CHECK(std::abs(back.theta - s0.theta) < 1e-9);
  CHECK(std::abs(back.omega - s0.omega) < 1e-9);
}

TEST_CASE("determinism") {
  auto run = [] {
    BodyState s{0.1, 0.0};
    for (int i = 0; i < 1000; ++i) s = step_physics(kDefaults, s, (i % 7 < 3) ? 1e-3 : -1e-3, 1e-3);
    return s;
  };
  const BodyState a = run(), b = run();
  CHECK(a.theta == b.theta);
  CHECK(a.omega == b.omega);
}

TEST_CASE("blow-up is reported") {
  CHECK_THROWS_AS((void)step_physics(kDefaults, {0.0, 2e4}, 0.0, 1e-3), NumericalError);
  CHECK_THROWS_AS((void)step_physics(kDefaults, {std::nan(""), 0.0}, 0.0, 1e-3), NumericalError);
  CHECK_THROWS_AS((void)step_physics(kDefaults, {0.0, 0.0}, 0.0, 0.0), UsageError);
}

TEST_CASE("clock validation") {
  SimClock c;
  CHECK_NOTHROW(c.validate());
  c.ctrl_period = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.sim_dt = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("trajectory record grid and CSV") {
  TrajectoryRecord rec(0.01);
  rec.push({0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  rec.push({0.01, 0.1, 0.2, 1e-3, -1.5, 2.0});
  CHECK_THROWS_AS(rec.push({0.05, 0, 0, 0, 0, 0}), UsageError);

  std::ostringstream out;
  rec.write_csv(out);
  CHECK(out.str() ==
        "t,theta,omega,tau,reward,energy\n"
        "0,0,0,0,0,1\n"
        "0.01,0.1,0.2,0.001,-1.5,2\n");

  std::istringstream in(out.str());
  const auto back = TrajectoryRecord::read_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back.rows()[1].omega == 0.2);
  CHECK(back.control_dt() == doctest::Approx(0.01));

  std::ostringstream phase;
  rec.write_phase_csv(phase);
  CHECK(phase.str() == "step,theta,omega\n0,0,0\n1,0.1,0.2\n");
}
