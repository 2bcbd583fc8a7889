// ellroll: train, evaluate and compare controllers for the torque-limited
// elliptical cylinder.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ellroll/errors.hpp"
#include "ellroll/experiment.hpp"

namespace ex = ellroll::experiment;

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> task;
  std::optional<std::string> out;
  bool dump_si = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI config file (defaults are used when omitted)");
  cmd->add_option("--seed", o.seed, "Override run.seed");
  cmd->add_option("--task", o.task, "Override run.task (v2v, h2v, h2h, v2h)");
  cmd->add_option("--out", o.out, "Override run.out (output directory)");
  cmd->add_flag("--dump-si", o.dump_si, "Print the resolved SI physics parameters before running");
  cmd->add_flag("-q,--quiet", o.quiet, "Suppress progress output");
}

ellroll::RunConfig resolve(const CommonOptions& o) {
  ellroll::RunConfig cfg = o.config_path.empty() ? ellroll::RunConfig{} : ellroll::RunConfig::load(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.task) cfg.task = ellroll::parse_task(*o.task);
  if (o.out) cfg.out_dir = *o.out;
  cfg.validate();
  if (o.dump_si) std::cout << ex::describe_physics(cfg);
  return cfg;
}

std::vector<ellroll::MetricRow> read_metrics(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ellroll::ConfigError("cannot open metrics file '" + path + "'");
  return ellroll::read_metric_rows(f);
}

void print_metrics(const ellroll::MetricRow& row) {
  const auto& r = row.report;
  std::cout << fmt::format("{} [{}]  ISE {:.4f}  ITSE {:.4f}  settling {}  error band {:.4f}\n", row.run_id,
                           row.method, r.ise, r.itse,
                           r.settling_time ? fmt::format("{:.2f} s", *r.settling_time) : "never settled",
                           r.error_band);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Torque-limited elliptical cylinder: DQN vs swing-up + LQR"};
  app.require_subcommand(1);

  CommonOptions train_o, eval_o, base_o, sweep_o, cmp_o, heat_o;
  auto* train = app.add_subcommand("train", "Train a DQN agent on one task");
  add_common(train, train_o);

  auto* eval = app.add_subcommand("eval", "Greedy rollout of a trained checkpoint");
  add_common(eval, eval_o);
  std::string checkpoint_path;
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file (default: <out>/best.ckpt.json)");

  auto* baseline = app.add_subcommand("baseline", "Closed-loop swing-up + LQR rollout");
  add_common(baseline, base_o);

  auto* sweep = app.add_subcommand("sweep", "Train/evaluate over the mass and semi-major axis grid");
  add_common(sweep, sweep_o);

  auto* compare = app.add_subcommand("compare", "Side-by-side settling time and error band");
  add_common(compare, cmp_o);
  std::string rl_path, su_path;
  compare->add_option("--rl", rl_path, "RL metrics CSV")->required();
  compare->add_option("--su", su_path, "Swing-up metrics CSV")->required();

  auto* heatmap = app.add_subcommand("heatmap", "Reward heatmaps (tau = 0 slice) for both reward variants");
  add_common(heatmap, heat_o);
  std::optional<double> th_min, th_max, w_min, w_max;
  std::optional<int> th_n, w_n;
  heatmap->add_option("--theta-min", th_min);
  heatmap->add_option("--theta-max", th_max);
  heatmap->add_option("--theta-points", th_n);
  heatmap->add_option("--omega-min", w_min);
  heatmap->add_option("--omega-max", w_max);
  heatmap->add_option("--omega-points", w_n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      const auto cfg = resolve(train_o);
      const auto out = ex::cmd_train(cfg, train_o.quiet ? nullptr : &std::cout);
      std::cout << fmt::format("best episode {} avg reward {:.4f}; wrote {} ({:.1f} s)\n", out.result.best.episode,
                               out.result.best.best_avg_reward, cfg.out_dir, out.wall_seconds);
      if (out.result.failure) {
        std::cerr << "numerical failure: " << *out.result.failure << " (partial log kept)\n";
        return 2;
      }
    } else if (*eval) {
      const auto cfg = resolve(eval_o);
      const std::string path =
          checkpoint_path.empty() ? (ex::fs::path(cfg.out_dir) / "best.ckpt.json").string() : checkpoint_path;
      print_metrics(ex::cmd_eval(cfg, ellroll::Checkpoint::load(path)).metrics);
    } else if (*baseline) {
      print_metrics(ex::cmd_baseline(resolve(base_o)).metrics);
    } else if (*sweep) {
      const auto cfg = resolve(sweep_o);
      const auto out = ex::cmd_sweep(cfg, sweep_o.quiet ? nullptr : &std::cout);
      for (const auto& flag : out.trend_flags) std::cout << flag << '\n';
      std::cout << "wrote " << out.table_csv.string() << '\n';
    } else if (*compare) {
      const auto cfg = resolve(cmp_o);
      std::cout << ex::cmd_compare(cfg, read_metrics(rl_path), read_metrics(su_path)).text;
    } else if (*heatmap) {
      const auto cfg = resolve(heat_o);
      std::optional<ellroll::HeatmapGrid> grid;
      if (th_min || th_max || th_n || w_min || w_max || w_n) {
        auto g = ellroll::HeatmapGrid::around(cfg.task_spec());
        g.theta_min = th_min.value_or(g.theta_min);
        g.theta_max = th_max.value_or(g.theta_max);
        g.theta_points = th_n.value_or(g.theta_points);
        g.omega_min = w_min.value_or(g.omega_min);
        g.omega_max = w_max.value_or(g.omega_max);
        g.omega_points = w_n.value_or(g.omega_points);
        grid = g;
      }
      const auto out = ex::cmd_heatmap(cfg, grid);
      std::cout << "wrote " << out.basic_csv.string() << " and " << out.normalized_csv.string() << '\n';
    }
  } catch (const ellroll::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
