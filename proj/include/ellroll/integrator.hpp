#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ellroll/dynamics.hpp"

namespace ellroll {

// Physics runs at 1 / sim_dt; the control input is held for ctrl_period
// physics sub-steps (zero-order hold).
struct SimClock {
  double sim_dt = 1e-3;
  int ctrl_period = 10;
  std::int64_t physics_steps = 0;

  void validate() const;
  [[nodiscard]] double time() const { return static_cast<double>(physics_steps) * sim_dt; }
  [[nodiscard]] double control_dt() const { return sim_dt * ctrl_period; }
  void reset() { physics_steps = 0; }
};

// |omega| above this is treated as a numerical blow-up.
inline constexpr double kMaxAngularSpeed = 1e4;

// One classical RK4 step with tau held constant. dt may be negative
// (used for reversibility checks) but not zero. Throws NumericalError on a
// non-finite result or |omega| > kMaxAngularSpeed.
[[nodiscard]] BodyState step_physics(const EllipseParams& p, const BodyState& s, double tau, double dt);

struct ControlStepResult {
  BodyState state;
  double elapsed = 0.0;  // s
  double work = 0.0;     // integral of tau*omega dt over the step, i.e. tau * delta theta, J
};

// Advances exactly clock.ctrl_period sub-steps with tau held and moves the
// clock forward.
ControlStepResult step_control(const EllipseParams& p, SimClock& clock, const BodyState& s, double tau);

// Row n holds the state at t = n * control_dt. tau and reward belong to the
// control step that ended at t, so row 0 (the initial state) carries zeros.
struct TrajectoryRow {
  double t = 0.0;
  double theta = 0.0;
  double omega = 0.0;
  double tau = 0.0;
  double reward = 0.0;
  double energy = 0.0;
};

class TrajectoryRecord {
 public:
  TrajectoryRecord() = default;
  explicit TrajectoryRecord(double control_dt) : control_dt_(control_dt) {}

  // Throws UsageError if t does not continue the control-step grid.
  void push(const TrajectoryRow& row);

  [[nodiscard]] const std::vector<TrajectoryRow>& rows() const { return rows_; }
  [[nodiscard]] double control_dt() const { return control_dt_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] bool empty() const { return rows_.empty(); }

  [[nodiscard]] std::vector<double> thetas() const;
  [[nodiscard]] std::vector<double> torques() const;

  // Header `t,theta,omega,tau,reward,energy`, 9 significant digits.
  void write_csv(std::ostream& out) const;
  // Columns `step,theta,omega`.
  void write_phase_csv(std::ostream& out) const;

  static TrajectoryRecord read_csv(std::istream& in);

 private:
  double control_dt_ = 0.01;
  std::vector<TrajectoryRow> rows_;
};

}  // namespace ellroll
