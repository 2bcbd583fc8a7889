#include "ellroll/dynamics.hpp"

#include <cmath>
#include <string>

#include "ellroll/errors.hpp"

namespace ellroll {

namespace {

struct Projections {
  double alpha;  // a sin(theta)
  double beta;   // b cos(theta)
  double sum_sq;
};

Projections project(const EllipseParams& p, double theta) {
  const double alpha = p.semi_major * std::sin(theta);
  const double beta = p.semi_minor * std::cos(theta);
  return {alpha, beta, alpha * alpha + beta * beta};
}

}  // namespace

void EllipseParams::validate() const {
  auto positive_finite = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive_finite(mass)) throw ConfigError("mass must be positive, got " + std::to_string(mass));
  if (!positive_finite(semi_minor))
    throw ConfigError("semi-minor axis must be positive, got " + std::to_string(semi_minor));
  if (!std::isfinite(semi_major) || semi_major < semi_minor)
    throw ConfigError("semi-major axis must be >= semi-minor axis (a=" + std::to_string(semi_major) +
                      ", b=" + std::to_string(semi_minor) + ")");
  if (!positive_finite(gravity)) throw ConfigError("gravity must be positive");
  if (!positive_finite(torque_limit)) throw ConfigError("torque limit must be positive");
}

double inertia(const EllipseParams& p, double theta) {
  const auto [alpha, beta, d] = project(p, theta);
  const double a2 = p.semi_major * p.semi_major;
  const double b2 = p.semi_minor * p.semi_minor;
  return p.centroidal_inertia() + p.mass * (a2 * alpha * alpha + b2 * beta * beta) / d;
}

double gravity_torque(const EllipseParams& p, double theta) {
  const auto [alpha, beta, d] = project(p, theta);
  const double a = p.semi_major;
  const double b = p.semi_minor;
  return p.mass * p.gravity * (a / b - b / a) * alpha * beta / std::sqrt(d);
}

double fictitious_torque(const EllipseParams& p, double theta, double omega) {
  const auto [alpha, beta, d] = project(p, theta);
  const double a = p.semi_major;
  const double b = p.semi_minor;
  return p.mass * a * b * (a * a - b * b) * alpha * beta / (d * d) * omega * omega;
}

double potential_energy(const EllipseParams& p, double theta) {
  return p.mass * p.gravity * std::sqrt(project(p, theta).sum_sq);
}

double total_energy(const EllipseParams& p, const BodyState& s) {
  return 0.5 * inertia(p, s.theta) * s.omega * s.omega + potential_energy(p, s.theta);
}

double acceleration(const EllipseParams& p, const BodyState& s, double tau) {
  return (tau - gravity_torque(p, s.theta) - fictitious_torque(p, s.theta, s.omega)) /
         inertia(p, s.theta);
}

}  // namespace ellroll
