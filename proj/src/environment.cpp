#include "ellroll/environment.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ellroll/csv.hpp"
#include "ellroll/errors.hpp"

namespace ellroll {

std::string_view to_string(RewardVariant v) { return v == RewardVariant::Basic ? "basic" : "normalized"; }

RewardVariant parse_reward_variant(std::string_view s) {
  if (s == "basic") return RewardVariant::Basic;
  if (s == "normalized") return RewardVariant::Normalized;
  throw ConfigError("unknown reward variant '" + std::string(s) + "' (expected basic|normalized)");
}

std::string_view task_key(TaskId id) {
  switch (id) {
    case TaskId::VerticalFlip: return "v2v";
    case TaskId::HorizontalToVertical: return "h2v";
    case TaskId::HorizontalFlip: return "h2h";
    case TaskId::VerticalToHorizontal: return "v2h";
  }
  return "?";
}

std::string_view task_label(TaskId id) {
  switch (id) {
    case TaskId::VerticalFlip: return "pi/2->3pi/2";
    case TaskId::HorizontalToVertical: return "0->pi/2";
    case TaskId::HorizontalFlip: return "0->pi";
    case TaskId::VerticalToHorizontal: return "pi/2->pi";
  }
  return "?";
}

TaskId parse_task(std::string_view key) {
  for (TaskId id : kAllTasks) {
    if (key == task_key(id) || key == task_label(id)) return id;
  }
  throw ConfigError("unknown task '" + std::string(key) + "' (expected v2v|h2v|h2h|v2h)");
}

TaskSpec::TaskSpec(double theta0, double theta_ref, int episode_steps, RewardVariant reward)
    : theta0_(theta0), theta_ref_(theta_ref), episode_steps_(episode_steps), reward_(reward) {
  if (!std::isfinite(theta0) || !std::isfinite(theta_ref)) throw ConfigError("task angles must be finite");
  if (theta0 == theta_ref) throw ConfigError("task requires theta_ref != theta0");
  if (episode_steps < 1) throw ConfigError("episode_steps must be >= 1");
}

TaskSpec TaskSpec::canonical(TaskId id, int episode_steps, RewardVariant reward) {
  switch (id) {
    case TaskId::VerticalFlip: return {kPi / 2, 3 * kPi / 2, episode_steps, reward};
    case TaskId::HorizontalToVertical: return {0.0, kPi / 2, episode_steps, reward};
    case TaskId::HorizontalFlip: return {0.0, kPi, episode_steps, reward};
    case TaskId::VerticalToHorizontal: return {kPi / 2, kPi, episode_steps, reward};
  }
  throw ConfigError("unknown task id");
}

double reward_basic(double theta, double omega, double tau, double theta_ref) {
  const double err = theta - theta_ref;
  if (std::abs(err) < 0.01 && std::abs(omega) < 1.0) return 2.0;
  if (std::abs(err) < 0.05) return 1.0;
  return -(err * err + 0.1 * omega * omega + 0.001 * tau * tau);
}

double reward_normalized(double theta, double omega, double tau, double theta_ref, double theta0) {
  if (theta_ref == theta0) throw ConfigError("normalized reward undefined for theta_ref == theta0");
  const double err = theta - theta_ref;
  if (std::abs(err) < 0.001 && std::abs(omega) < 0.001) return 2.0;
  if (std::abs(err) < 0.02) return 1.0;
  const double scaled = kPi / (theta_ref - theta0) * err;
  return -(scaled * scaled + 0.025 * omega * omega + 4000.0 * tau * tau);
}

double reward(const TaskSpec& task, double theta, double omega, double tau) {
  return task.reward_variant() == RewardVariant::Basic
             ? reward_basic(theta, omega, tau, task.theta_ref())
             : reward_normalized(theta, omega, tau, task.theta_ref(), task.theta0());
}

Environment::Environment(TaskSpec task, EllipseParams params, SimClock clock, ResetNoise noise)
    : task_(task), params_(params), clock_(clock), noise_(noise), noise_rng_(noise.seed) {
  params_.validate();
  clock_.validate();
}

Observation Environment::reset() {
  state_ = {task_.theta0(), 0.0};
  if (noise_.enabled()) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    state_.theta += noise_.theta_amplitude * unit(noise_rng_);
    state_.omega += noise_.omega_amplitude * unit(noise_rng_);
  }
  clock_.reset();
  steps_ = 0;
  was_reset_ = true;
  return observe();
}

StepResult Environment::step(ActionIndex action) { return step_torque(action.torque(params_.torque_limit)); }

StepResult Environment::step_torque(double tau) {
  if (!was_reset_) throw UsageError("Environment::step called before reset");
  if (truncated()) throw UsageError("Environment::step called after truncation; call reset()");
  tau = std::clamp(tau, -params_.torque_limit, params_.torque_limit);
  state_ = step_control(params_, clock_, state_, tau).state;
  ++steps_;
  return {observe(), reward(task_, state_.theta, state_.omega, tau), tau, truncated()};
}

void HeatmapGrid::validate() const {
  if (theta_points < 1 || omega_points < 1) throw ConfigError("heatmap grid needs at least one point per axis");
  if (theta_max < theta_min || omega_max < omega_min) throw ConfigError("heatmap grid bounds are inverted");
}

namespace {
std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}
}  // namespace

std::vector<double> HeatmapGrid::thetas() const { return linspace(theta_min, theta_max, theta_points); }
std::vector<double> HeatmapGrid::omegas() const { return linspace(omega_min, omega_max, omega_points); }

HeatmapGrid HeatmapGrid::around(const TaskSpec& task) {
  return {task.theta_ref() - kPi, task.theta_ref() + kPi, 201, -10.0, 10.0, 201};
}

void RewardHeatmap::write_csv(std::ostream& out) const {
  out << "theta\\omega";
  for (double w : omegas) out << ',' << csv::num(w);
  out << '\n';
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    out << csv::num(thetas[i]);
    for (std::size_t j = 0; j < omegas.size(); ++j) out << ',' << csv::num(at(i, j));
    out << '\n';
  }
}

RewardHeatmap reward_heatmap(const TaskSpec& task, const HeatmapGrid& grid) {
  grid.validate();
  RewardHeatmap h{grid.thetas(), grid.omegas(), {}};
  h.values.reserve(h.thetas.size() * h.omegas.size());
  for (double th : h.thetas) {
    for (double w : h.omegas) h.values.push_back(reward(task, th, w, 0.0));
  }
  return h;
}

}  // namespace ellroll
