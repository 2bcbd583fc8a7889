#pragma once

#include <functional>

#include "ellroll/environment.hpp"
#include "ellroll/integrator.hpp"
#include "ellroll/qnetwork.hpp"
#include "ellroll/sulqr.hpp"

namespace ellroll {

// Maps the current observation to a torque (clamped by the environment).
using TorquePolicy = std::function<double(const Observation&)>;

// Resets env and runs one full episode. The record has episode_steps + 1
// rows: the initial state followed by one row per control step.
[[nodiscard]] TrajectoryRecord rollout(Environment& env, const TorquePolicy& policy);

// Greedy (epsilon = 0) Q-network policy.
[[nodiscard]] TrajectoryRecord rollout_greedy(const QNetwork& net, const TaskSpec& task, const EllipseParams& params,
                                              const SimClock& clock = {}, bool normalize = false);

[[nodiscard]] TrajectoryRecord rollout_sulqr(const SuLqrController& controller, const TaskSpec& task,
                                             const EllipseParams& params, const SimClock& clock = {});

}  // namespace ellroll
