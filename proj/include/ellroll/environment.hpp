#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ellroll/dynamics.hpp"
#include "ellroll/integrator.hpp"

namespace ellroll {

inline constexpr double kPi = 3.14159265358979323846;

enum class RewardVariant { Basic, Normalized };

[[nodiscard]] std::string_view to_string(RewardVariant v);
[[nodiscard]] RewardVariant parse_reward_variant(std::string_view s);

// The four canonical movement scenarios.
enum class TaskId {
  VerticalFlip,          // pi/2 -> 3pi/2
  HorizontalToVertical,  // 0 -> pi/2
  HorizontalFlip,        // 0 -> pi
  VerticalToHorizontal,  // pi/2 -> pi
};

inline constexpr std::array<TaskId, 4> kAllTasks = {TaskId::VerticalFlip, TaskId::HorizontalToVertical,
                                                    TaskId::HorizontalFlip, TaskId::VerticalToHorizontal};

// Short ids used on the command line and in CSVs: v2v, h2v, h2h, v2h.
[[nodiscard]] std::string_view task_key(TaskId id);
[[nodiscard]] std::string_view task_label(TaskId id);  // e.g. "0->pi/2"
[[nodiscard]] TaskId parse_task(std::string_view key);

class TaskSpec {
 public:
  // Throws ConfigError when theta_ref == theta0 or episode_steps < 1.
  TaskSpec(double theta0, double theta_ref, int episode_steps = 2048,
           RewardVariant reward = RewardVariant::Normalized);

  static TaskSpec canonical(TaskId id, int episode_steps = 2048, RewardVariant reward = RewardVariant::Normalized);

  [[nodiscard]] double theta0() const { return theta0_; }
  [[nodiscard]] double theta_ref() const { return theta_ref_; }
  [[nodiscard]] int episode_steps() const { return episode_steps_; }
  [[nodiscard]] RewardVariant reward_variant() const { return reward_; }

 private:
  double theta0_;
  double theta_ref_;
  int episode_steps_;
  RewardVariant reward_;
};

struct Observation {
  double theta = 0.0;
  double omega = 0.0;
  double theta_ref = 0.0;

  [[nodiscard]] std::array<double, 3> to_array() const { return {theta, omega, theta_ref}; }
};

inline constexpr int kNumActions = 3;

// 0 -> -tau_max, 1 -> 0, 2 -> +tau_max. Frozen for checkpoint portability.
class ActionIndex {
 public:
  constexpr explicit ActionIndex(int index) : index_(index) {
    if (index < 0 || index >= kNumActions) throw std::out_of_range("action index out of range");
  }
  [[nodiscard]] constexpr int value() const { return index_; }
  [[nodiscard]] double torque(double tau_max) const { return static_cast<double>(index_ - 1) * tau_max; }
  friend constexpr bool operator==(ActionIndex, ActionIndex) = default;

 private:
  int index_;
};

// Gym-pendulum style reward with fixed thresholds.
[[nodiscard]] double reward_basic(double theta, double omega, double tau, double theta_ref);

// Distance term scaled by pi / (theta_ref - theta0) so every task spans a
// similar reward range. Throws ConfigError if theta_ref == theta0.
[[nodiscard]] double reward_normalized(double theta, double omega, double tau, double theta_ref, double theta0);

[[nodiscard]] double reward(const TaskSpec& task, double theta, double omega, double tau);

// Optional uniform perturbation of the reset state. Off by default.
struct ResetNoise {
  double theta_amplitude = 0.0;
  double omega_amplitude = 0.0;
  std::uint64_t seed = 0;
  [[nodiscard]] bool enabled() const { return theta_amplitude > 0.0 || omega_amplitude > 0.0; }
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  double tau = 0.0;
  bool truncated = false;
};

class Environment {
 public:
  Environment(TaskSpec task, EllipseParams params, SimClock clock = {}, ResetNoise noise = {});

  Observation reset();

  // Applies the mapped torque over one control period and scores the state
  // the body lands in. The step that reaches episode_steps returns
  // truncated = true; stepping again throws UsageError.
  StepResult step(ActionIndex action);
  // Same contract with an arbitrary torque, clamped to +-tau_max.
  StepResult step_torque(double tau);

  [[nodiscard]] Observation observe() const { return {state_.theta, state_.omega, task_.theta_ref()}; }
  [[nodiscard]] const BodyState& state() const { return state_; }
  [[nodiscard]] const TaskSpec& task() const { return task_; }
  [[nodiscard]] const EllipseParams& params() const { return params_; }
  [[nodiscard]] const SimClock& clock() const { return clock_; }
  [[nodiscard]] int steps_taken() const { return steps_; }
  [[nodiscard]] bool truncated() const { return steps_ >= task_.episode_steps(); }

 private:
  TaskSpec task_;
  EllipseParams params_;
  SimClock clock_;
  ResetNoise noise_;
  std::mt19937_64 noise_rng_;
  BodyState state_;
  int steps_ = 0;
  bool was_reset_ = false;
};

struct HeatmapGrid {
  double theta_min = 0.0;
  double theta_max = 0.0;
  int theta_points = 1;
  double omega_min = 0.0;
  double omega_max = 0.0;
  int omega_points = 1;

  void validate() const;
  [[nodiscard]] std::vector<double> thetas() const;
  [[nodiscard]] std::vector<double> omegas() const;
  // theta in [theta_ref - pi, theta_ref + pi], omega in [-10, 10], 201 x 201.
  static HeatmapGrid around(const TaskSpec& task);
};

struct RewardHeatmap {
  std::vector<double> thetas;
  std::vector<double> omegas;
  std::vector<double> values;  // row-major, thetas.size() x omegas.size()

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[i * omegas.size() + j]; }
  // First row: omega grid (corner cell "theta\omega"); first column: theta grid.
  void write_csv(std::ostream& out) const;
};

// Reward evaluated pointwise at tau = 0.
[[nodiscard]] RewardHeatmap reward_heatmap(const TaskSpec& task, const HeatmapGrid& grid);

}  // namespace ellroll
