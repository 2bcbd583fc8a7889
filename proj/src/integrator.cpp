#include "ellroll/integrator.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ellroll/csv.hpp"
#include "ellroll/errors.hpp"

namespace ellroll {

void SimClock::validate() const {
  if (!(std::isfinite(sim_dt) && sim_dt > 0.0)) throw ConfigError("sim_dt must be positive");
  if (ctrl_period < 1) throw ConfigError("ctrl_period must be >= 1");
}

BodyState step_physics(const EllipseParams& p, const BodyState& s, double tau, double dt) {
  if (dt == 0.0 || !std::isfinite(dt)) throw UsageError("step_physics: dt must be finite and nonzero");

  auto deriv = [&](const BodyState& x) { return BodyState{x.omega, acceleration(p, x, tau)}; };
  auto advance = [](const BodyState& x, const BodyState& k, double h) {
    return BodyState{x.theta + h * k.theta, x.omega + h * k.omega};
  };

  const BodyState k1 = deriv(s);
  const BodyState k2 = deriv(advance(s, k1, dt / 2));
  const BodyState k3 = deriv(advance(s, k2, dt / 2));
  const BodyState k4 = deriv(advance(s, k3, dt));

  const BodyState next{
      s.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
      s.omega + dt / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega)};

  if (!std::isfinite(next.theta) || !std::isfinite(next.omega) ||
      std::abs(next.omega) > kMaxAngularSpeed) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integration blew up: from (theta=" << s.theta << ", omega=" << s.omega
        << ") with tau=" << tau << ", dt=" << dt << " to (theta=" << next.theta
        << ", omega=" << next.omega << ")";
    throw NumericalError(msg.str());
  }
  return next;
}

ControlStepResult step_control(const EllipseParams& p, SimClock& clock, const BodyState& s, double tau) {
  ControlStepResult r{s, 0.0, 0.0};
  for (int i = 0; i < clock.ctrl_period; ++i) {
    const BodyState next = step_physics(p, r.state, tau, clock.sim_dt);
    r.work += tau * (next.theta - r.state.theta);
    r.state = next;
    ++clock.physics_steps;
  }
  r.elapsed = clock.control_dt();
  return r;
}

void TrajectoryRecord::push(const TrajectoryRow& row) {
  const double expected = static_cast<double>(rows_.size()) * control_dt_;
  if (std::abs(row.t - expected) > 1e-9 * std::max(1.0, expected)) {
    throw UsageError("trajectory row at t=" + std::to_string(row.t) + " breaks the control grid (expected t=" +
                     std::to_string(expected) + ")");
  }
  rows_.push_back(row);
}

std::vector<double> TrajectoryRecord::thetas() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.theta);
  return out;
}

std::vector<double> TrajectoryRecord::torques() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.tau);
  return out;
}

void TrajectoryRecord::write_csv(std::ostream& out) const {
  out << "t,theta,omega,tau,reward,energy\n";
  for (const auto& r : rows_) {
    out << csv::join({csv::num(r.t), csv::num(r.theta), csv::num(r.omega), csv::num(r.tau), csv::num(r.reward),
                      csv::num(r.energy)})
        << '\n';
  }
}

void TrajectoryRecord::write_phase_csv(std::ostream& out) const {
  out << "step,theta,omega\n";
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    out << i << ',' << csv::num(rows_[i].theta) << ',' << csv::num(rows_[i].omega) << '\n';
  }
}

TrajectoryRecord TrajectoryRecord::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,theta,omega,tau,reward,energy")
    throw ConfigError("trajectory CSV: unexpected header '" + line + "'");
  std::vector<TrajectoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 6) throw ConfigError("trajectory CSV: expected 6 fields, got " + std::to_string(f.size()));
    rows.push_back({csv::parse_double(f[0]), csv::parse_double(f[1]), csv::parse_double(f[2]),
                    csv::parse_double(f[3]), csv::parse_double(f[4]), csv::parse_double(f[5])});
  }
  // Times are printed to 9 digits, so recover the grid spacing from the span.
  const double dt = rows.size() > 1 ? (rows.back().t - rows.front().t) / static_cast<double>(rows.size() - 1) : 0.01;
  TrajectoryRecord rec(dt);
  rec.rows_ = std::move(rows);
  return rec;
}

}  // namespace ellroll
