#pragma once

// Rigid-body model of an elliptical cylinder rolling without slip on a
// horizontal plane. Single degree of freedom: the rotation angle theta,
// counter-clockwise positive, with theta = 0 when the minor axis is vertical
// (lying flat) and theta = pi/2 when the major axis is vertical (standing).
//
// All quantities are SI: kg, m, s, N*m, J.

namespace ellroll {

struct EllipseParams {
  double mass = 0.020;         // kg
  double semi_major = 0.034;   // a, m
  double semi_minor = 0.026;   // b, m
  double gravity = 9.81;       // m/s^2
  double torque_limit = 1e-3;  // N*m

  // Throws ConfigError unless a >= b > 0 and m, g, torque_limit > 0.
  void validate() const;

  // Centroidal moment of inertia I = m (a^2 + b^2) / 4.
  [[nodiscard]] double centroidal_inertia() const {
    return mass * (semi_major * semi_major + semi_minor * semi_minor) / 4.0;
  }
};

struct BodyState {
  double theta = 0.0;  // rad, unwrapped
  double omega = 0.0;  // rad/s
};

// Effective inertia about the contact point, J(theta). Period pi.
[[nodiscard]] double inertia(const EllipseParams& p, double theta);

// Gravity-induced torque tau_p(theta) = dV/dtheta.
[[nodiscard]] double gravity_torque(const EllipseParams& p, double theta);

// Velocity-squared torque from the configuration-dependent inertia,
// tau_f = J'(theta) omega^2 / 2.
[[nodiscard]] double fictitious_torque(const EllipseParams& p, double theta, double omega);

// V(theta) = m g sqrt(a^2 sin^2 + b^2 cos^2): centre-of-mass height times m g.
[[nodiscard]] double potential_energy(const EllipseParams& p, double theta);

// E = J(theta) omega^2 / 2 + V(theta).
[[nodiscard]] double total_energy(const EllipseParams& p, const BodyState& s);

// theta'' = (tau - tau_p - tau_f) / J. The torque bound is not enforced here.
[[nodiscard]] double acceleration(const EllipseParams& p, const BodyState& s, double tau);

}  // namespace ellroll
