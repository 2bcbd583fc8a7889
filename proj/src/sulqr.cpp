#include "ellroll/sulqr.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "ellroll/errors.hpp"

namespace ellroll {

namespace {

double saturate(double tau, double limit) { return std::clamp(tau, -limit, limit); }

double ramp(double x, double threshold) { return std::clamp(1.0 - std::abs(x) / threshold, 0.0, 1.0); }

bool positive_semidefinite(const Eigen::Matrix2d& Q) {
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff())) return false;
  return Q(0, 0) >= 0.0 && Q(1, 1) >= 0.0 && Q.determinant() >= -1e-12 * Q.squaredNorm();
}

}  // namespace

void SuLqrConfig::validate() const {
  if (!(energy_gain > 0.0)) throw ConfigError("swing-up energy gain must be positive");
  if (!positive_semidefinite(state_cost)) throw ConfigError("LQR state cost Q must be symmetric PSD");
  if (!(input_cost > 0.0)) throw ConfigError("LQR input cost R must be positive");
  if (!(blend_angle > 0.0 && blend_speed > 0.0 && sign_softening > 0.0))
    throw ConfigError("blend thresholds and sign softening must be positive");
  if (!(crossing_margin >= 0.0)) throw ConfigError("crossing margin must be non-negative");
}

double wrap_angle(double x) {
  double y = std::fmod(x + kPi, 2.0 * kPi);
  if (y <= 0.0) y += 2.0 * kPi;
  return y - kPi;
}

double target_energy(const EllipseParams& p, double theta_ref) { return potential_energy(p, theta_ref); }

double swing_up_torque_to_level(const EllipseParams& p, const SuLqrConfig& cfg, const BodyState& s,
                                double energy_level) {
  const double error = energy_level - total_energy(p, s);
  return saturate(cfg.energy_gain * error * std::tanh(s.omega / cfg.sign_softening), p.torque_limit);
}

double swing_up_torque(const EllipseParams& p, const SuLqrConfig& cfg, const BodyState& s, double theta_ref) {
  return swing_up_torque_to_level(p, cfg, s, target_energy(p, theta_ref));
}

LinearModel linearize(const EllipseParams& p, double theta_ref) {
  constexpr double h = 1e-6;
  const double dtau = (gravity_torque(p, theta_ref + h) - gravity_torque(p, theta_ref - h)) / (2.0 * h);
  const double J = inertia(p, theta_ref);
  LinearModel m;
  m.A << 0.0, 1.0, -dtau / J, 0.0;
  m.B << 0.0, 1.0 / J;
  m.tau_eq = gravity_torque(p, theta_ref);
  m.theta_ref = theta_ref;
  return m;
}

double care_residual(const Eigen::Matrix2d& A, const Eigen::Vector2d& B, const Eigen::Matrix2d& Q, double R,
                     const Eigen::Matrix2d& P) {
  const Eigen::Matrix2d res = A.transpose() * P + P * A - P * B * (1.0 / R) * B.transpose() * P + Q;
  return res.cwiseAbs().maxCoeff();
}

LqrGain solve_care(const Eigen::Matrix2d& A, const Eigen::Vector2d& B, const Eigen::Matrix2d& Q, double R) {
  if (A(0, 0) != 0.0 || A(0, 1) != 1.0 || A(1, 1) != 0.0 || B(0) != 0.0)
    throw ConfigError("solve_care expects A = [[0,1],[a,0]], B = [0,b]");
  if (!(R > 0.0)) throw ConfigError("solve_care: R must be positive");
  if (!positive_semidefinite(Q)) throw ConfigError("solve_care: Q must be symmetric PSD");
  const double a = A(1, 0);
  const double b = B(1);
  if (b == 0.0) throw ConfigError("solve_care: pair (A, B) is not stabilizable (b = 0)");

  // Entrywise with P = [[p1, p2], [p2, p3]] and s = b^2 / R:
  //   (1,1): s p2^2 - 2 a p2 - q11 = 0
  //   (2,2): s p3^2 - 2 p2 - q22 = 0
  //   (1,2): p1 = s p2 p3 - a p3 - q12
  // The stabilizing solution takes the positive branch of each quadratic.
  const double s = b * b / R;
  const double p2 = (a + std::sqrt(a * a + s * Q(0, 0))) / s;
  const double disc = (2.0 * p2 + Q(1, 1)) / s;
  if (!(disc > 0.0)) throw ConfigError("solve_care: no stabilizing solution (Q too weak for this model)");
  const double p3 = std::sqrt(disc);
  const double p1 = s * p2 * p3 - a * p3 - Q(0, 1);

  LqrGain g;
  g.P << p1, p2, p2, p3;
  g.K = (b / R) * Eigen::RowVector2d(p2, p3);

  const double scale = std::max({1.0, Q.cwiseAbs().maxCoeff(), g.P.cwiseAbs().maxCoeff()});
  const double residual = care_residual(A, B, Q, R, g.P);
  if (!(residual < 1e-9 * scale))
    throw ConfigError("solve_care: residual " + std::to_string(residual) + " exceeds tolerance");
  if (!(p1 > 0.0 && g.P.determinant() > 0.0)) throw ConfigError("solve_care: Riccati solution is not positive definite");
  const Eigen::Matrix2d closed = A - B * g.K;
  const auto eig = closed.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (!(eig(i).real() < 0.0)) throw ConfigError("solve_care: closed loop is not stable");
  }
  return g;
}

double lqr_torque(const LinearModel& model, const LqrGain& gain, const BodyState& s, double torque_limit) {
  const Eigen::Vector2d x(wrap_angle(s.theta - model.theta_ref), s.omega);
  return saturate(model.tau_eq - gain.K.dot(x), torque_limit);
}

double blend_alpha(const SuLqrConfig& cfg, const BodyState& s, double theta_ref) {
  return ramp(wrap_angle(s.theta - theta_ref), cfg.blend_angle) * ramp(s.omega, cfg.blend_speed);
}

SuLqrController::SuLqrController(const EllipseParams& p, const SuLqrConfig& cfg, const TaskSpec& task)
    : params_(p), cfg_(cfg), theta0_(task.theta0()), theta_ref_(task.theta_ref()) {
  params_.validate();
  cfg_.validate();
  model_ = linearize(params_, theta_ref_);
  gain_ = solve_care(model_.A, model_.B, cfg_.state_cost, cfg_.input_cost);
}

double SuLqrController::energy_level(const BodyState& s) const {
  // V peaks (standing) sit at odd multiples of pi/2 and all share V = m g a.
  const double peak = params_.mass * params_.gravity * params_.semi_major;
  const double margin = cfg_.crossing_margin * params_.mass * params_.gravity *
                        (params_.semi_major - params_.semi_minor);

  const double lo = std::min(s.theta, theta_ref_);
  const double hi = std::max(s.theta, theta_ref_);
  bool peak_between = false;
  for (double k = std::floor((lo - kPi / 2) / kPi); ; k += 1.0) {
    const double candidate = kPi / 2 + k * kPi;
    if (candidate >= hi) break;
    if (candidate > lo && std::abs(candidate - theta_ref_) > 1e-12) {
      peak_between = true;
      break;
    }
  }

  double level = peak_between ? peak + margin : target_energy(params_, theta_ref_);
  const bool moving_away = s.omega * (theta_ref_ - s.theta) < 0.0;
  if (moving_away) level = std::min(level, peak - margin);
  return level;
}

double SuLqrController::torque(const BodyState& s) const {
  const double limit = params_.torque_limit;
  const double alpha = blend_alpha(cfg_, s, theta_ref_);
  if (cfg_.rest_nudge && alpha == 0.0 && std::abs(s.omega) < 1e-6) {
    return theta_ref_ > theta0_ ? limit : -limit;
  }
  const double tau_su = swing_up_torque_to_level(params_, cfg_, s, energy_level(s));
  const double tau_lqr = lqr_torque(model_, gain_, s, limit);
  return saturate(alpha * tau_lqr + (1.0 - alpha) * tau_su, limit);
}

}  // namespace ellroll
