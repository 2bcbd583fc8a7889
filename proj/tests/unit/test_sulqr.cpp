#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "ellroll/dynamics.hpp"
#include "ellroll/environment.hpp"
#include "ellroll/errors.hpp"
#include "ellroll/integrator.hpp"
#include "ellroll/rollout.hpp"
#include "ellroll/sulqr.hpp"

using namespace ellroll;

namespace {
const EllipseParams kDefaults{};
}

TEST_CASE("double integrator gain") {
  Eigen::Matrix2d A;
  A << 0, 1, 0, 0;
  const Eigen::Vector2d B(0, 1);
  const Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
  const LqrGain g = solve_care(A, B, Q, 1.0);
  CHECK(std::abs(g.K(0) - 1.0) < 1e-6);
  CHECK(std::abs(g.K(1) - std::sqrt(3.0)) < 1e-6);
  CHECK(care_residual(A, B, Q, 1.0, g.P) < 1e-12);
  CHECK((g.P - g.P.transpose()).norm() == 0.0);
}

TEST_CASE("gain is invariant under joint scaling of Q and R") {
  const LinearModel m = linearize(kDefaults, kPi / 2);
  const SuLqrConfig cfg;
  const LqrGain g1 = solve_care(m.A, m.B, cfg.state_cost, cfg.input_cost);
  const LqrGain g2 = solve_care(m.A, m.B, 7.0 * cfg.state_cost, 7.0 * cfg.input_cost);
  CHECK((g1.K - g2.K).norm() / g1.K.norm() < 1e-9);
}

TEST_CASE("closed loop is stable for every task") {
  const SuLqrConfig cfg;
  for (TaskId id : kAllTasks) {
    const TaskSpec task = TaskSpec::canonical(id);
    const LinearModel m = linearize(kDefaults, task.theta_ref());
    const LqrGain g = solve_care(m.A, m.B, cfg.state_cost, cfg.input_cost);
    CHECK(care_residual(m.A, m.B, cfg.state_cost, cfg.input_cost, g.P) < 1e-9 * g.P.norm());
    const Eigen::Matrix2d cl = m.A - m.B * g.K;
    const auto ev = cl.eigenvalues();
    for (int i = 0; i < 2; ++i) CHECK(ev(i).real() < 0.0);
    CHECK(m.tau_eq == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("linearization signs") {
  // Upright (a vertical) is an unstable equilibrium, lying flat is stable.
  const LinearModel up = linearize(kDefaults, kPi / 2);
  const LinearModel flat = linearize(kDefaults, kPi);
  CHECK(up.A(1, 0) == doctest::Approx(85.808).epsilon(1e-4));
  CHECK(flat.A(1, 0) == doctest::Approx(-159.707).epsilon(1e-4));
  CHECK(up.B(1) == doctest::Approx(1.0 / inertia(kDefaults, kPi / 2)).epsilon(1e-12));
}

TEST_CASE("riccati input validation") {
  Eigen::Matrix2d A;
  A << 0, 1, 1, 0;
  const Eigen::Vector2d B(0, 1);
  CHECK_THROWS_AS((void)solve_care(A, B, Eigen::Matrix2d::Identity(), 0.0), ConfigError);
  Eigen::Matrix2d bad = Eigen::Matrix2d::Identity();
  bad(0, 0) = -1;
  CHECK_THROWS_AS((void)solve_care(A, B, bad, 1.0), ConfigError);
  Eigen::Matrix2d general;
  general << 1, 1, 1, 0;
  CHECK_THROWS_AS((void)solve_care(general, B, Eigen::Matrix2d::Identity(), 1.0), ConfigError);
}

TEST_CASE("controller output is always within the torque limit") {
  const SuLqrConfig cfg;
  for (TaskId id : kAllTasks) {
    const SuLqrController c(kDefaults, cfg, TaskSpec::canonical(id));
    for (int i = 0; i <= 60; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const BodyState s{-2 * kPi + i * (4 * kPi / 60), -20.0 + j};
        const double tau = c.torque(s);
        CHECK(std::isfinite(tau));
        CHECK(std::abs(tau) <= kDefaults.torque_limit);
      }
    }
  }
}

TEST_CASE("blend weight") {
  const SuLqrConfig cfg;
  CHECK(blend_alpha(cfg, {1.0, 0.0}, 1.0) == 1.0);
  CHECK(blend_alpha(cfg, {1.15, 1.0}, 1.0) == doctest::Approx(0.25));
  CHECK(blend_alpha(cfg, {1.0 + 0.3, 0.0}, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(blend_alpha(cfg, {1.0, 2.5}, 1.0) == 0.0);
  CHECK(blend_alpha(cfg, {1.0 + 2 * kPi, 0.0}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("blended torque is continuous") {
  const SuLqrConfig cfg;
  const TaskSpec task = TaskSpec::canonical(TaskId::HorizontalToVertical);
  const SuLqrController c(kDefaults, cfg, task);
  // Sweep through the LQR blend boundary at constant speed.
  double prev = c.torque({task.theta_ref() - 0.5, 1.0});
  for (int i = 1; i <= 4000; ++i) {
    const double th = task.theta_ref() - 0.5 + i * 1e-4;
    const double tau = c.torque({th, 1.0});
    CHECK(std::abs(tau - prev) < 0.05 * kDefaults.torque_limit);
    prev = tau;
  }
}

TEST_CASE("wrap invariance") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  const SuLqrConfig cfg;
  const TaskSpec task = TaskSpec::canonical(TaskId::HorizontalToVertical);
  const SuLqrController c(kDefaults, cfg, task);
  const LqrGain g = c.gain();
  for (double e : {-0.2, -0.05, 0.0, 0.1, 0.25}) {
    const BodyState s{task.theta_ref() + e, 0.3};
    const BodyState w{task.theta_ref() + e + 2 * kPi, 0.3};
    CHECK(lqr_torque(c.model(), g, s, 1e-3) == doctest::Approx(lqr_torque(c.model(), g, w, 1e-3)).epsilon(1e-12));
    CHECK(blend_alpha(cfg, s, task.theta_ref()) == doctest::Approx(blend_alpha(cfg, w, task.theta_ref())));
  }
}

TEST_CASE("lqr alone recovers from a small offset") {
  const SuLqrConfig cfg;
  for (TaskId id : kAllTasks) {
    const TaskSpec task = TaskSpec::canonical(id);
    const LinearModel m = linearize(kDefaults, task.theta_ref());
    const LqrGain g = solve_care(m.A, m.B, cfg.state_cost, cfg.input_cost);
    SimClock clock;
    BodyState s{task.theta_ref() + 0.05, 0.0};
    for (int k = 0; k < 500; ++k) s = step_control(kDefaults, clock, s, lqr_torque(m, g, s, 1e-3)).state;
    CHECK(std::abs(s.theta - task.theta_ref()) < 1e-3);
  }
}

TEST_CASE("swing-up drives energy toward the level") {
  const SuLqrConfig cfg;
  const double level = target_energy(kDefaults, kPi / 2);
  // Energy below the level with the body moving: torque must do positive work.
  for (double w : {-3.0, -0.5, 0.5, 3.0}) {
    const BodyState s{0.2, w};
    const double tau = swing_up_torque_to_level(kDefaults, cfg, s, level);
    CHECK(tau * w > 0.0);
  }
  const BodyState over{0.2, 30.0};
  CHECK(total_energy(kDefaults, over) > level);
  CHECK(swing_up_torque_to_level(kDefaults, cfg, over, level) < 0.0);

  // Below the level the law only ever adds energy: tau * omega >= 0 at every
  // sample, and each 1 ms sub-step that does not cross omega = 0 raises E.
  BodyState s{0.0, 0.5};
  int below = 0;
  for (int k = 0; k < 3000; ++k) {
    const double e = total_energy(kDefaults, s);
    const double tau = swing_up_torque_to_level(kDefaults, cfg, s, level);
    const BodyState next = step_physics(kDefaults, s, tau, 1e-3);
    if (e < level) {
      ++below;
      CHECK(tau * s.omega >= 0.0);
      if (s.omega * next.omega > 0.0) CHECK(total_energy(kDefaults, next) - e >= -1e-10 * level);
    }
    s = next;
  }
  CHECK(below > 100);
}

TEST_CASE("energy schedule across an intermediate peak") {
  const SuLqrConfig cfg;
  const SuLqrController flip(kDefaults, cfg, TaskSpec::canonical(TaskId::HorizontalFlip));
  const double peak = kDefaults.mass * kDefaults.gravity * kDefaults.semi_major;
  CHECK(flip.energy_level({0.0, 0.0}) > peak);
  CHECK(flip.energy_level({kPi - 0.1, 0.0}) == doctest::Approx(target_energy(kDefaults, kPi)));
  const SuLqrController up(kDefaults, cfg, TaskSpec::canonical(TaskId::HorizontalToVertical));
  CHECK(up.energy_level({0.0, 0.0}) == doctest::Approx(target_energy(kDefaults, kPi / 2)));
}

TEST_CASE("baseline reaches every canonical target") {
  const SuLqrConfig cfg;
  for (TaskId id : kAllTasks) {
    const TaskSpec task = TaskSpec::canonical(id);
    const SuLqrController c(kDefaults, cfg, task);
    const TrajectoryRecord rec = rollout_sulqr(c, task, kDefaults);
    CHECK(rec.size() == 2049);
    CHECK(std::abs(rec.rows().back().theta - task.theta_ref()) < 0.031);
  }
}

TEST_CASE("config validation") {
  SuLqrConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.energy_gain = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.blend_angle = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("target energy and swing-up law examples") {
  CHECK(target_energy(kDefaults, kPi / 2) == doctest::Approx(6.6708e-3).epsilon(1e-12));
  CHECK(target_energy(kDefaults, kPi) == doctest::Approx(5.1012e-3).epsilon(1e-12));
  CHECK(target_energy(kDefaults, 0.0) ==
        doctest::Approx(kDefaults.mass * kDefaults.gravity * kDefaults.semi_minor).epsilon(1e-14));

  const SuLqrConfig cfg;
  CHECK(swing_up_torque(kDefaults, cfg, {0.4, 0.0}, kPi / 2) == 0.0);
  const BodyState s{0.3, 2.0};
  const double gap = target_energy(kDefaults, kPi / 2) - total_energy(kDefaults, s);
  REQUIRE(gap > 0.0);
  const double expected = std::min(cfg.energy_gain * gap * std::tanh(2.0 / cfg.sign_softening), 1e-3);
  CHECK(swing_up_torque(kDefaults, cfg, s, kPi / 2) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(swing_up_torque(kDefaults, cfg, s, kPi / 2) > 0.0);

  // Energy exactly at the level gives zero torque.
  const double level = total_energy(kDefaults, s);
  CHECK(swing_up_torque_to_level(kDefaults, cfg, s, level) == 0.0);
}

TEST_CASE("lqr torque at the target and under saturation") {
  const SuLqrConfig cfg;
  const LinearModel m = linearize(kDefaults, kPi / 2);
  const LqrGain g = solve_care(m.A, m.B, cfg.state_cost, cfg.input_cost);
  CHECK(std::abs(lqr_torque(m, g, {kPi / 2, 0.0}, 1e-3)) < 1e-15);
  CHECK(lqr_torque(m, g, {kPi / 2 + 1.0, 0.0}, 1e-3) == -1e-3);
  CHECK(lqr_torque(m, g, {kPi / 2 - 1.0, 0.0}, 1e-3) == 1e-3);
  // Blend identity inside the ramp and pure swing-up outside it.
  const TaskSpec task = TaskSpec::canonical(TaskId::HorizontalToVertical);
  const SuLqrController c(kDefaults, cfg, task);
  const BodyState inside{kPi / 2 + 0.05, 0.4};
  const double a = blend_alpha(cfg, inside, task.theta_ref());
  const double mix = a * lqr_torque(c.model(), c.gain(), inside, 1e-3) +
                     (1 - a) * swing_up_torque_to_level(kDefaults, cfg, inside, c.energy_level(inside));
  CHECK(c.torque(inside) == doctest::Approx(mix).epsilon(1e-12));
  const BodyState outside{0.5, 3.0};
  CHECK(c.torque(outside) ==
        doctest::Approx(swing_up_torque_to_level(kDefaults, cfg, outside, c.energy_level(outside))).epsilon(1e-12));
}
