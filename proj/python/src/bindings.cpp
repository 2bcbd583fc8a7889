#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ellroll/config.hpp"
#include "ellroll/dqn.hpp"
#include "ellroll/dynamics.hpp"
#include "ellroll/environment.hpp"
#include "ellroll/errors.hpp"
#include "ellroll/experiment.hpp"
#include "ellroll/integrator.hpp"
#include "ellroll/metrics.hpp"
#include "ellroll/rollout.hpp"
#include "ellroll/sulqr.hpp"

namespace py = pybind11;
using namespace ellroll;
namespace ex = ellroll::experiment;

namespace {

py::dict trajectory_dict(const TrajectoryRecord& rec) {
  std::vector<double> t, th, w, tau, r, e;
  for (const auto& row : rec.rows()) {
    t.push_back(row.t);
    th.push_back(row.theta);
    w.push_back(row.omega);
    tau.push_back(row.tau);
    r.push_back(row.reward);
    e.push_back(row.energy);
  }
  py::dict d;
  d["t"] = t;
  d["theta"] = th;
  d["omega"] = w;
  d["tau"] = tau;
  d["reward"] = r;
  d["energy"] = e;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Torque-limited elliptical cylinder: simulation, DQN and swing-up + LQR";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_RuntimeError);

  py::class_<EllipseParams>(m, "EllipseParams")
      .def(py::init<>())
      .def_readwrite("mass", &EllipseParams::mass)
      .def_readwrite("semi_major", &EllipseParams::semi_major)
      .def_readwrite("semi_minor", &EllipseParams::semi_minor)
      .def_readwrite("gravity", &EllipseParams::gravity)
      .def_readwrite("torque_limit", &EllipseParams::torque_limit)
      .def("validate", &EllipseParams::validate)
      .def("centroidal_inertia", &EllipseParams::centroidal_inertia);

  py::class_<BodyState>(m, "BodyState")
      .def(py::init<double, double>(), py::arg("theta") = 0.0, py::arg("omega") = 0.0)
      .def_readwrite("theta", &BodyState::theta)
      .def_readwrite("omega", &BodyState::omega)
      .def("__repr__", [](const BodyState& s) {
        return "BodyState(theta=" + std::to_string(s.theta) + ", omega=" + std::to_string(s.omega) + ")";
      });

  m.def("inertia", &inertia, py::arg("params"), py::arg("theta"));
  m.def("gravity_torque", &gravity_torque, py::arg("params"), py::arg("theta"));
  m.def("fictitious_torque", &fictitious_torque, py::arg("params"), py::arg("theta"), py::arg("omega"));
  m.def("potential_energy", &potential_energy, py::arg("params"), py::arg("theta"));
  m.def("total_energy", &total_energy, py::arg("params"), py::arg("state"));
  m.def("acceleration", &acceleration, py::arg("params"), py::arg("state"), py::arg("tau"));
  m.def("step_physics", &step_physics, py::arg("params"), py::arg("state"), py::arg("tau"), py::arg("dt") = 1e-3);

  py::enum_<TaskId>(m, "TaskId")
      .value("VERTICAL_FLIP", TaskId::VerticalFlip)
      .value("HORIZONTAL_TO_VERTICAL", TaskId::HorizontalToVertical)
      .value("HORIZONTAL_FLIP", TaskId::HorizontalFlip)
      .value("VERTICAL_TO_HORIZONTAL", TaskId::VerticalToHorizontal);
  m.def("parse_task", &parse_task);
  m.def("task_key", [](TaskId id) { return std::string(task_key(id)); });

  py::enum_<RewardVariant>(m, "RewardVariant")
      .value("BASIC", RewardVariant::Basic)
      .value("NORMALIZED", RewardVariant::Normalized);

  py::class_<TaskSpec>(m, "TaskSpec")
      .def(py::init<double, double, int, RewardVariant>(), py::arg("theta0"), py::arg("theta_ref"),
           py::arg("episode_steps") = 2048, py::arg("reward") = RewardVariant::Normalized)
      .def_static("canonical", &TaskSpec::canonical, py::arg("task"), py::arg("episode_steps") = 2048,
                  py::arg("reward") = RewardVariant::Normalized)
      .def_property_readonly("theta0", &TaskSpec::theta0)
      .def_property_readonly("theta_ref", &TaskSpec::theta_ref)
      .def_property_readonly("episode_steps", &TaskSpec::episode_steps);

  m.def("reward_basic", &reward_basic, py::arg("theta"), py::arg("omega"), py::arg("tau"), py::arg("theta_ref"));
  m.def("reward_normalized", &reward_normalized, py::arg("theta"), py::arg("omega"), py::arg("tau"),
        py::arg("theta_ref"), py::arg("theta0"));

  py::class_<Observation>(m, "Observation")
      .def_readonly("theta", &Observation::theta)
      .def_readonly("omega", &Observation::omega)
      .def_readonly("theta_ref", &Observation::theta_ref)
      .def("to_tuple", [](const Observation& o) { return py::make_tuple(o.theta, o.omega, o.theta_ref); });

  py::class_<Environment>(m, "Environment")
      .def(py::init([](const TaskSpec& task, const EllipseParams& params) { return Environment(task, params); }),
           py::arg("task"), py::arg("params") = EllipseParams{})
      .def("reset", &Environment::reset)
      .def(
          "step",
          [](Environment& env, int action) {
            const StepResult r = env.step(ActionIndex(action));
            return py::make_tuple(r.observation, r.reward, r.truncated);
          },
          py::arg("action"))
      .def(
          "step_torque",
          [](Environment& env, double tau) {
            const StepResult r = env.step_torque(tau);
            return py::make_tuple(r.observation, r.reward, r.truncated);
          },
          py::arg("tau"))
      .def_property_readonly("state", &Environment::state)
      .def_property_readonly("steps_taken", &Environment::steps_taken)
      .def_property_readonly("time", [](const Environment& env) { return env.clock().time(); });

  py::class_<SuLqrConfig>(m, "SuLqrConfig")
      .def(py::init<>())
      .def_readwrite("energy_gain", &SuLqrConfig::energy_gain)
      .def_readwrite("state_cost", &SuLqrConfig::state_cost)
      .def_readwrite("input_cost", &SuLqrConfig::input_cost)
      .def_readwrite("blend_angle", &SuLqrConfig::blend_angle)
      .def_readwrite("blend_speed", &SuLqrConfig::blend_speed);

  py::class_<SuLqrController>(m, "SuLqrController")
      .def(py::init<const EllipseParams&, const SuLqrConfig&, const TaskSpec&>(), py::arg("params"),
           py::arg("config"), py::arg("task"))
      .def("torque", &SuLqrController::torque)
      .def_property_readonly("gain", [](const SuLqrController& c) { return Eigen::RowVector2d(c.gain().K); });

  m.def(
      "solve_care",
      [](const Eigen::Matrix2d& A, const Eigen::Vector2d& B, const Eigen::Matrix2d& Q, double R) {
        const LqrGain g = solve_care(A, B, Q, R);
        return py::make_tuple(Eigen::RowVector2d(g.K), Eigen::Matrix2d(g.P));
      },
      py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("R"));

  m.def(
      "rollout_sulqr",
      [](const TaskSpec& task, const EllipseParams& params, const SuLqrConfig& cfg) {
        return trajectory_dict(rollout_sulqr(SuLqrController(params, cfg, task), task, params));
      },
      py::arg("task"), py::arg("params") = EllipseParams{}, py::arg("config") = SuLqrConfig{});

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("ise", &MetricReport::ise)
      .def_readonly("itse", &MetricReport::itse)
      .def_readonly("settling_time", &MetricReport::settling_time)
      .def_readonly("error_band", &MetricReport::error_band);

  m.def(
      "evaluate_metrics",
      [](const std::vector<double>& thetas, double theta_ref, double dt, double band, double tail) {
        return evaluate_metrics(thetas, theta_ref, dt, MetricSettings{band, tail});
      },
      py::arg("thetas"), py::arg("theta_ref"), py::arg("dt") = 0.01, py::arg("settle_band") = 0.031,
      py::arg("tail_fraction") = 0.2);

  py::class_<QNetwork>(m, "QNetwork")
      .def(py::init<std::vector<int>>(), py::arg("shape") = QNetwork::default_shape())
      .def_property_readonly("shape", &QNetwork::shape)
      .def("forward", [](const QNetwork& n, const Eigen::VectorXd& x) { return Eigen::VectorXd(n.forward(x)); })
      .def("parameter_count", &QNetwork::parameter_count);

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_static("load", &Checkpoint::load)
      .def_readonly("network", &Checkpoint::network)
      .def_readonly("episode", &Checkpoint::episode)
      .def_readonly("best_avg_reward", &Checkpoint::best_avg_reward)
      .def_readonly("config_hash", &Checkpoint::config_hash);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_static("parse", [](const std::string& text) { return RunConfig::parse(text); })
      .def_static("load", &RunConfig::load)
      .def("serialize", &RunConfig::serialize)
      .def("hash", &RunConfig::hash)
      .def("validate", &RunConfig::validate)
      .def("physics", &RunConfig::physics)
      .def("task_spec", &RunConfig::task_spec)
      .def_readwrite("task", &RunConfig::task)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("epochs", &RunConfig::epochs)
      .def_readwrite("episode_steps", &RunConfig::episode_steps)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("mass_g", &RunConfig::mass_g)
      .def_readwrite("semi_major_mm", &RunConfig::semi_major_mm)
      .def_readwrite("semi_minor_mm", &RunConfig::semi_minor_mm)
      .def_property(
          "batch_size", [](const RunConfig& c) { return c.agent.batch_size; },
          [](RunConfig& c, int b) { c.agent.batch_size = b; })
      .def_property(
          "hidden", [](const RunConfig& c) { return c.agent.hidden; },
          [](RunConfig& c, std::vector<int> h) { c.agent.hidden = std::move(h); });

  m.def(
      "train",
      [](const RunConfig& cfg) {
        std::optional<ex::TrainOutput> trained;
        {
          py::gil_scoped_release release;
          trained = ex::cmd_train(cfg);
        }
        const ex::TrainOutput& out = *trained;
        py::list rewards;
        for (const auto& e : out.result.log) rewards.append(e.avg_reward);
        py::dict d;
        d["avg_rewards"] = rewards;
        d["best_episode"] = out.result.best.episode;
        d["best_avg_reward"] = out.result.best.best_avg_reward;
        d["best_checkpoint"] = out.best_checkpoint.string();
        d["log"] = out.log.string();
        d["failure"] = out.result.failure;
        return d;
      },
      py::arg("config"));
  m.def(
      "evaluate",
      [](const RunConfig& cfg, const std::string& checkpoint) {
        const ex::EvalOutput out = ex::cmd_eval(cfg, Checkpoint::load(checkpoint));
        return py::make_tuple(out.metrics.report, trajectory_dict(out.trajectory));
      },
      py::arg("config"), py::arg("checkpoint"));
  m.def(
      "baseline",
      [](const RunConfig& cfg) {
        const ex::EvalOutput out = ex::cmd_baseline(cfg);
        return py::make_tuple(out.metrics.report, trajectory_dict(out.trajectory));
      },
      py::arg("config"));
  m.def("describe_physics", &ex::describe_physics);
}
