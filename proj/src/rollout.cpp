#include "ellroll/rollout.hpp"

namespace ellroll {

TrajectoryRecord rollout(Environment& env, const TorquePolicy& policy) {
  const EllipseParams& p = env.params();
  TrajectoryRecord rec(env.clock().control_dt());
  Observation obs = env.reset();
  rec.push({0.0, obs.theta, obs.omega, 0.0, 0.0, total_energy(p, env.state())});
  bool done = false;
  while (!done) {
    const StepResult r = env.step_torque(policy(obs));
    obs = r.observation;
    rec.push({env.clock().time(), obs.theta, obs.omega, r.tau, r.reward, total_energy(p, env.state())});
    done = r.truncated;
  }
  return rec;
}

TrajectoryRecord rollout_greedy(const QNetwork& net, const TaskSpec& task, const EllipseParams& params,
                                const SimClock& clock, bool normalize) {
  Environment env(task, params, clock);
  const double limit = params.torque_limit;
  return rollout(env, [&](const Observation& obs) { return greedy_action(net, obs, normalize).torque(limit); });
}

TrajectoryRecord rollout_sulqr(const SuLqrController& controller, const TaskSpec& task, const EllipseParams& params,
                               const SimClock& clock) {
  Environment env(task, params, clock);
  return rollout(env, [&](const Observation& obs) { return controller.torque({obs.theta, obs.omega}); });
}

}  // namespace ellroll
