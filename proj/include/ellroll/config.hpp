#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ellroll/dqn.hpp"
#include "ellroll/environment.hpp"
#include "ellroll/integrator.hpp"
#include "ellroll/metrics.hpp"
#include "ellroll/sulqr.hpp"

namespace ellroll {

// Parameter grid varied one variable at a time around the base body.
struct SweepSpec {
  std::vector<double> masses_g = {15, 20, 25};
  std::vector<double> semi_majors_mm = {28, 30, 32, 34, 36};
  std::vector<TaskId> tasks = {TaskId::HorizontalToVertical, TaskId::HorizontalFlip};
  int workers = 0;  // 0 = one per hardware thread
};

// Everything a run depends on. Body dimensions are stored in the units of
// the config file (g, mm) and converted by physics().
struct RunConfig {
  TaskId task = TaskId::HorizontalToVertical;
  std::uint64_t seed = 0;
  int epochs = 1000;
  int episode_steps = 2048;
  RewardVariant reward = RewardVariant::Normalized;
  std::string out_dir = "runs/default";

  double mass_g = 20.0;
  double semi_major_mm = 34.0;
  double semi_minor_mm = 26.0;
  double gravity = 9.81;
  double torque_limit = 1e-3;

  SimClock clock;
  double reset_theta_noise = 0.0;
  double reset_omega_noise = 0.0;

  AgentHyperparams agent;
  SuLqrConfig sulqr;
  MetricSettings metrics;
  SweepSpec sweep;

  void validate() const;

  [[nodiscard]] EllipseParams physics() const;
  [[nodiscard]] TaskSpec task_spec() const;
  [[nodiscard]] ResetNoise reset_noise() const;

  // Canonical INI text: fixed section/key order, shortest round-trip numbers.
  [[nodiscard]] std::string serialize() const;
  // 16 hex digits of FNV-1a over serialize(), ignoring the output directory.
  [[nodiscard]] std::string hash() const;

  // Missing keys keep their defaults; unknown sections or keys are errors.
  static RunConfig parse(std::string_view ini_text);
  static RunConfig load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace ellroll
