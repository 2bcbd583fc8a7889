#pragma once

#include <Eigen/Dense>

#include "ellroll/dynamics.hpp"
#include "ellroll/environment.hpp"

namespace ellroll {

// Two-stage baseline: energy-shaping swing-up blended into a local LQR.
struct SuLqrConfig {
  double energy_gain = 0.8;                               // k_E, N*m per J
  Eigen::Matrix2d state_cost = Eigen::Vector2d(100.0, 1.0).asDiagonal();  // Q
  double input_cost = 1e7;                                // R
  double blend_angle = 0.3;                               // theta_c, rad
  double blend_speed = 2.0;                               // omega_c, rad/s
  double sign_softening = 0.1;                            // omega_eps in tanh(omega / omega_eps), rad/s
  // Energy overshoot above an intermediate potential peak while crossing it,
  // as a fraction of m g (a - b).
  double crossing_margin = 0.05;
  bool rest_nudge = true;

  void validate() const;
};

// Second-order single-DOF linearization about (theta_ref, 0):
// A = [[0, 1], [-tau_p'(theta_ref) / J, 0]], B = [0, 1 / J].
struct LinearModel {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d B = Eigen::Vector2d::Zero();
  double tau_eq = 0.0;
  double theta_ref = 0.0;
};

struct LqrGain {
  Eigen::RowVector2d K = Eigen::RowVector2d::Zero();
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
};

// Wraps to (-pi, pi].
[[nodiscard]] double wrap_angle(double x);

// E* = V(theta_ref).
[[nodiscard]] double target_energy(const EllipseParams& p, double theta_ref);

// sat(k_E (E_level - E) tanh(omega / omega_eps)).
[[nodiscard]] double swing_up_torque_to_level(const EllipseParams& p, const SuLqrConfig& cfg, const BodyState& s,
                                              double energy_level);
// Same law with E_level = V(theta_ref).
[[nodiscard]] double swing_up_torque(const EllipseParams& p, const SuLqrConfig& cfg, const BodyState& s,
                                     double theta_ref);

// tau_p' by central differences with h = 1e-6.
[[nodiscard]] LinearModel linearize(const EllipseParams& p, double theta_ref);

// Continuous algebraic Riccati equation A'P + PA - P B R^-1 B' P + Q = 0 for
// the structured model above, in closed form. Throws ConfigError when the
// input is not of that structure, Q is not PSD, R <= 0, no stabilizing
// solution exists, or the residual check fails.
[[nodiscard]] LqrGain solve_care(const Eigen::Matrix2d& A, const Eigen::Vector2d& B, const Eigen::Matrix2d& Q,
                                 double R);

// Max-norm of the CARE residual.
[[nodiscard]] double care_residual(const Eigen::Matrix2d& A, const Eigen::Vector2d& B, const Eigen::Matrix2d& Q,
                                   double R, const Eigen::Matrix2d& P);

// sat(tau_eq - K [wrap(theta - theta_ref), omega]).
[[nodiscard]] double lqr_torque(const LinearModel& model, const LqrGain& gain, const BodyState& s,
                                double torque_limit);

// clamp(1 - |wrap(theta - theta_ref)| / theta_c) * clamp(1 - |omega| / omega_c).
[[nodiscard]] double blend_alpha(const SuLqrConfig& cfg, const BodyState& s, double theta_ref);

// Controller for one task. Precomputes the gain at construction.
class SuLqrController {
 public:
  SuLqrController(const EllipseParams& p, const SuLqrConfig& cfg, const TaskSpec& task);

  // alpha * tau_lqr + (1 - alpha) * tau_su, saturated. The swing-up level is
  // scheduled by energy_level(); at exact rest outside the LQR region a
  // single +-tau_max nudge toward the target replaces the blend.
  [[nodiscard]] double torque(const BodyState& s) const;

  // Swing-up energy level: V(theta_ref) when no potential peak lies strictly
  // between theta and theta_ref, else that peak's V plus the crossing margin.
  // When moving away from the target the level is capped just below a peak,
  // so the body can never go over the top in the wrong direction.
  [[nodiscard]] double energy_level(const BodyState& s) const;

  [[nodiscard]] const LinearModel& model() const { return model_; }
  [[nodiscard]] const LqrGain& gain() const { return gain_; }
  [[nodiscard]] const SuLqrConfig& config() const { return cfg_; }

 private:
  EllipseParams params_;
  SuLqrConfig cfg_;
  double theta0_;
  double theta_ref_;
  LinearModel model_;
  LqrGain gain_;
};

}  // namespace ellroll
