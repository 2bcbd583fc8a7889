#include "ellroll/experiment.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "ellroll/csv.hpp"
#include "ellroll/errors.hpp"
#include "ellroll/rollout.hpp"

namespace ellroll::experiment {

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

fs::path prepare_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

MetricRow make_row(const RunConfig& cfg, const std::string& method, const TrajectoryRecord& traj) {
  MetricRow row;
  row.run_id = run_id(cfg);
  row.method = method;
  row.task = std::string(task_key(cfg.task));
  row.mass_g = cfg.mass_g;
  row.semi_major_mm = cfg.semi_major_mm;
  row.semi_minor_mm = cfg.semi_minor_mm;
  row.report = evaluate_metrics(traj.thetas(), cfg.task_spec().theta_ref(), traj.control_dt(), cfg.metrics);
  return row;
}

EvalOutput write_rollout(const RunConfig& cfg, const std::string& prefix, const std::string& method,
                         TrajectoryRecord traj) {
  const fs::path dir = prepare_dir(cfg);
  EvalOutput out{std::move(traj), {}, dir / (prefix + "_trajectory.csv"), dir / (prefix + "_phase.csv"),
                 dir / (prefix + "_metrics.csv")};
  out.metrics = make_row(cfg, method, out.trajectory);
  {
    auto f = open_out(out.trajectory_csv);
    out.trajectory.write_csv(f);
  }
  {
    auto f = open_out(out.phase_csv);
    out.trajectory.write_phase_csv(f);
  }
  {
    auto f = open_out(out.metrics_csv);
    write_metric_rows(f, {out.metrics});
  }
  for (const auto& p : {out.trajectory_csv, out.phase_csv, out.metrics_csv}) write_sidecar(p, cfg, prefix);
  return out;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string opt_num(const std::optional<double>& v) { return v ? csv::num(*v) : std::string(); }

}  // namespace

void write_sidecar(const fs::path& file, const RunConfig& cfg, const std::string& command) {
  nlohmann::json j;
  j["file"] = file.filename().string();
  j["command"] = command;
  j["config_hash"] = cfg.hash();
  j["seed"] = cfg.seed;
  j["config"] = cfg.serialize();
  auto f = open_out(fs::path(file.string() + ".meta.json"));
  f << j.dump(1) << '\n';
}

std::string run_id(const RunConfig& cfg) {
  return fmt::format("{}-m{}-a{}-b{}-s{}", task_key(cfg.task), cfg.mass_g, cfg.semi_major_mm, cfg.semi_minor_mm,
                     cfg.seed);
}

TrainOutput cmd_train(const RunConfig& cfg, std::ostream* progress) {
  cfg.validate();
  const fs::path dir = prepare_dir(cfg);
  TrainOutput out;
  out.log = dir / "training_log.csv";
  out.best_checkpoint = dir / "best.ckpt.json";
  out.final_checkpoint = dir / "final.ckpt.json";
  out.config_snapshot = dir / "config.ini";
  out.reward_curve = dir / "reward_curve.csv";
  cfg.save(out.config_snapshot.string());

  TrainingOptions opts;
  opts.epochs = cfg.epochs;
  opts.seed = cfg.seed;
  opts.config_hash = cfg.hash();
  opts.reset_noise = cfg.reset_noise();
  if (progress) {
    opts.on_episode = [progress](const EpisodeLog& e) {
      *progress << fmt::format("episode {:4d}  avg_reward {:>12.4f}  epsilon {:.4f}  in_target {}\n", e.episode,
                               e.avg_reward, e.epsilon, e.steps_in_target)
                << std::flush;
    };
  }
  const auto t0 = std::chrono::steady_clock::now();
  out.result = train(cfg.task_spec(), cfg.physics(), cfg.clock, cfg.agent, opts);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  {
    auto f = open_out(out.log);
    write_training_log(f, out.result.log);
  }
  {
    std::vector<double> avg;
    for (const auto& e : out.result.log) avg.push_back(e.avg_reward);
    const auto smooth = moving_average(avg, 20);
    auto f = open_out(out.reward_curve);
    f << "episode,avg_reward,moving_avg_20\n";
    for (std::size_t i = 0; i < avg.size(); ++i) f << i << ',' << csv::num(avg[i]) << ',' << csv::num(smooth[i]) << '\n';
  }
  write_sidecar(out.log, cfg, "train");
  write_sidecar(out.reward_curve, cfg, "train");
  out.result.best.save(out.best_checkpoint.string());
  out.result.last.save(out.final_checkpoint.string());
  return out;
}

EvalOutput cmd_eval(const RunConfig& cfg, const Checkpoint& checkpoint) {
  cfg.validate();
  const QNetwork expected(cfg.agent.network_shape());
  if (checkpoint.network.shape() != expected.shape()) {
    throw ConfigError("checkpoint network " + checkpoint.network.shape_string() +
                      " does not match configured network " + expected.shape_string());
  }
  return write_rollout(cfg, "eval", "rl",
                       rollout_greedy(checkpoint.network, cfg.task_spec(), cfg.physics(), cfg.clock,
                                      cfg.agent.normalize_observations));
}

EvalOutput cmd_baseline(const RunConfig& cfg) {
  cfg.validate();
  const SuLqrController controller(cfg.physics(), cfg.sulqr, cfg.task_spec());
  return write_rollout(cfg, "baseline", "su", rollout_sulqr(controller, cfg.task_spec(), cfg.physics(), cfg.clock));
}

SweepOutput cmd_sweep(const RunConfig& cfg, std::ostream* progress) {
  cfg.validate();
  const fs::path dir = prepare_dir(cfg);
  SweepOutput out;

  auto cell_id = [](TaskId t, double m, double a) { return fmt::format("{}-m{}-a{}", task_key(t), m, a); };
  std::map<std::string, std::size_t> index;
  struct Pending {
    std::string parameter;
    double value;
    std::string id;
  };
  std::vector<Pending> pending;
  auto add = [&](TaskId t, const std::string& param, double value, double m, double a) {
    const std::string id = cell_id(t, m, a);
    if (!index.count(id)) {
      index[id] = out.cells.size();
      out.cells.push_back(SweepCell{id, t, m, a, std::nullopt, -1, 0.0, {}, {}, {}});
    }
    pending.push_back({param, value, id});
  };
  for (TaskId t : cfg.sweep.tasks) {
    for (double m : cfg.sweep.masses_g) add(t, "m", m, m, cfg.semi_major_mm);
    for (double a : cfg.sweep.semi_majors_mm) add(t, "a", a, cfg.mass_g, a);
  }

  std::mutex progress_mutex;
  auto run_cell = [&](SweepCell& cell) {
    RunConfig c = cfg;
    c.task = cell.task;
    c.mass_g = cell.mass_g;
    c.semi_major_mm = cell.semi_major_mm;
    c.out_dir = (dir / cell.id).string();
    try {
      TrainOutput tr = cmd_train(c);
      if (tr.result.failure) throw NumericalError(*tr.result.failure);
      cell.best_epoch = tr.result.best.episode;
      cell.best_avg_reward = tr.result.best.best_avg_reward;
      for (const auto& e : tr.result.log) cell.avg_rewards.push_back(e.avg_reward);
      cell.rl = cmd_eval(c, tr.result.best).metrics.report;
      cell.su = cmd_baseline(c).metrics.report;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      *progress << "sweep cell " << cell.id << (cell.error ? " FAILED: " + *cell.error : std::string(" done")) << '\n'
                << std::flush;
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(out.cells.size(), cfg.sweep.workers > 0 ? static_cast<std::size_t>(cfg.sweep.workers) : hw);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.cells.size(); i = next++) run_cell(out.cells[i]);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& p : pending) out.rows.push_back({p.parameter, p.value, &out.cells[index.at(p.id)]});

  out.table_csv = dir / "sweep_table.csv";
  {
    auto f = open_out(out.table_csv);
    f << "parameter,value,task,best_epoch,best_avg_reward,rl_ise,rl_itse,su_ise,su_itse,status\n";
    for (const auto& r : out.rows) {
      const SweepCell& c = *r.cell;
      const bool ok = !c.error;
      f << csv::join({r.parameter, csv::num(r.value), std::string(task_key(c.task)),
                      ok ? std::to_string(c.best_epoch) : "", ok ? csv::num(c.best_avg_reward) : "",
                      ok ? csv::num(c.rl.ise) : "", ok ? csv::num(c.rl.itse) : "", ok ? csv::num(c.su.ise) : "",
                      ok ? csv::num(c.su.itse) : "", ok ? "ok" : "failed: " + sanitize(*c.error)})
        << '\n';
    }
  }
  out.curves_csv = dir / "sweep_curves.csv";
  {
    auto f = open_out(out.curves_csv);
    std::vector<std::vector<double>> smooth;
    std::size_t longest = 0;
    f << "episode";
    for (const auto& c : out.cells) {
      f << ',' << c.id;
      smooth.push_back(moving_average(c.avg_rewards, 20));
      longest = std::max(longest, c.avg_rewards.size());
    }
    f << '\n';
    for (std::size_t i = 0; i < longest; ++i) {
      f << i;
      for (const auto& s : smooth) f << ',' << (i < s.size() ? csv::num(s[i]) : std::string());
      f << '\n';
    }
  }

  // Soft qualitative checks; reported, never fatal.
  for (TaskId t : cfg.sweep.tasks) {
    if (t != TaskId::HorizontalToVertical) continue;
    std::vector<std::pair<double, double>> by_mass;
    std::vector<std::pair<double, double>> by_axis;
    for (const auto& r : out.rows) {
      if (r.cell->task != t || r.cell->error) continue;
      (r.parameter == "m" ? by_mass : by_axis).emplace_back(r.value, r.cell->rl.ise);
    }
    std::sort(by_mass.begin(), by_mass.end());
    bool monotone = by_mass.size() >= 2;
    for (std::size_t i = 1; i < by_mass.size(); ++i) monotone = monotone && by_mass[i].second >= by_mass[i - 1].second;
    out.trend_flags.push_back(fmt::format("{}: RL ISE non-decreasing in m: {}", task_key(t), monotone ? "yes" : "no"));

    double hi_sum = 0, lo_sum = 0;
    int hi_n = 0, lo_n = 0;
    for (const auto& [a, v] : by_axis) {
      if (a >= 34) {
        hi_sum += v;
        ++hi_n;
      } else {
        lo_sum += v;
        ++lo_n;
      }
    }
    const bool sharp = hi_n > 0 && lo_n > 0 && hi_sum / hi_n > 2.0 * (lo_sum / lo_n);
    out.trend_flags.push_back(
        fmt::format("{}: RL ISE sharply worse (>2x mean) at a >= 34 mm: {}", task_key(t), sharp ? "yes" : "no"));
  }
  for (const auto& c : out.cells) {
    if (c.error) out.trend_flags.push_back("cell " + c.id + " failed: " + *c.error);
  }
  out.trends_txt = dir / "sweep_trends.txt";
  {
    auto f = open_out(out.trends_txt);
    for (const auto& flag : out.trend_flags) f << flag << '\n';
  }
  for (const auto& p : {out.table_csv, out.curves_csv, out.trends_txt}) write_sidecar(p, cfg, "sweep");
  return out;
}

std::vector<CompareEntry> compare_metrics(const std::vector<MetricRow>& rl, const std::vector<MetricRow>& su) {
  auto key = [](const MetricRow& r) {
    return fmt::format("task={} m={} a={} b={}", r.task, r.mass_g, r.semi_major_mm, r.semi_minor_mm);
  };
  std::map<std::string, const MetricRow*> su_by_key;
  for (const auto& r : su) su_by_key[key(r)] = &r;
  std::map<std::string, const MetricRow*> rl_by_key;
  for (const auto& r : rl) rl_by_key[key(r)] = &r;

  std::vector<std::string> missing;
  for (const auto& [k, _] : rl_by_key) {
    if (!su_by_key.count(k)) missing.push_back("RL row without SU partner: " + k);
  }
  for (const auto& [k, _] : su_by_key) {
    if (!rl_by_key.count(k)) missing.push_back("SU row without RL partner: " + k);
  }
  if (!missing.empty()) {
    std::string msg = "compare: mismatched runs";
    for (const auto& m : missing) msg += "\n  " + m;
    throw ConfigError(msg);
  }

  // Canonical task order first, then anything else in input order.
  std::vector<const MetricRow*> ordered;
  for (TaskId t : kAllTasks) {
    for (const auto& r : rl) {
      if (r.task == task_key(t)) ordered.push_back(&r);
    }
  }
  for (const auto& r : rl) {
    if (std::find(ordered.begin(), ordered.end(), &r) == ordered.end()) ordered.push_back(&r);
  }

  std::vector<CompareEntry> out;
  for (const char* metric : {"settling_time", "error_band"}) {
    const bool settle = std::string(metric) == "settling_time";
    for (const MetricRow* r : ordered) {
      const MetricRow& s = *su_by_key.at(key(*r));
      out.push_back({metric, r->task, r->mass_g, r->semi_major_mm, r->semi_minor_mm,
                     settle ? s.report.settling_time : std::optional<double>(s.report.error_band),
                     settle ? r->report.settling_time : std::optional<double>(r->report.error_band)});
    }
  }
  return out;
}

std::string render_comparison(const std::vector<CompareEntry>& entries) {
  auto show = [](const std::optional<double>& v, bool settle) {
    return v ? fmt::format("{:.3f}", *v) : std::string(settle ? "never settled" : "n/a");
  };
  std::string text = fmt::format("{:<14} {:<12} {:>16} {:>16} {:>12}\n", "metric", "task", "swing-up+LQR", "DQN",
                                 "RL - SU");
  for (const auto& e : entries) {
    const bool settle = e.metric == "settling_time";
    std::string label = "n/a";
    for (TaskId t : kAllTasks) {
      if (e.task == task_key(t)) label = std::string(task_label(t));
    }
    const std::string diff = (e.su && e.rl) ? fmt::format("{:+.3f}", *e.rl - *e.su) : "n/a";
    text += fmt::format("{:<14} {:<12} {:>16} {:>16} {:>12}\n", settle ? "settling [s]" : "error band [rad]", label,
                        show(e.su, settle), show(e.rl, settle), diff);
  }
  return text;
}

CompareOutput cmd_compare(const RunConfig& cfg, const std::vector<MetricRow>& rl, const std::vector<MetricRow>& su) {
  const fs::path dir = prepare_dir(cfg);
  CompareOutput out{compare_metrics(rl, su), {}, dir / "compare.csv", dir / "compare.txt"};
  out.text = render_comparison(out.entries);
  {
    auto f = open_out(out.csv);
    f << "metric,task,m,a,b,su,rl,difference\n";
    for (const auto& e : out.entries) {
      const std::string diff = (e.su && e.rl) ? csv::num(*e.rl - *e.su) : std::string();
      f << csv::join({e.metric, e.task, csv::num(e.mass_g), csv::num(e.semi_major_mm), csv::num(e.semi_minor_mm),
                      opt_num(e.su), opt_num(e.rl), diff})
        << '\n';
    }
  }
  {
    auto f = open_out(out.txt);
    f << out.text;
  }
  write_sidecar(out.csv, cfg, "compare");
  write_sidecar(out.txt, cfg, "compare");
  return out;
}

HeatmapOutput cmd_heatmap(const RunConfig& cfg, const std::optional<HeatmapGrid>& grid) {
  cfg.validate();
  const fs::path dir = prepare_dir(cfg);
  HeatmapOutput out{dir / "heatmap_basic.csv", dir / "heatmap_normalized.csv"};
  for (RewardVariant v : {RewardVariant::Basic, RewardVariant::Normalized}) {
    const TaskSpec task = TaskSpec::canonical(cfg.task, cfg.episode_steps, v);
    const RewardHeatmap h = reward_heatmap(task, grid.value_or(HeatmapGrid::around(task)));
    const fs::path& p = v == RewardVariant::Basic ? out.basic_csv : out.normalized_csv;
    auto f = open_out(p);
    h.write_csv(f);
    f.close();
    write_sidecar(p, cfg, "heatmap");
  }
  return out;
}

std::string describe_physics(const RunConfig& cfg) {
  const EllipseParams p = cfg.physics();
  return fmt::format(
      "mass_kg = {}\nsemi_major_m = {}\nsemi_minor_m = {}\ngravity_m_s2 = {}\ntorque_limit_Nm = {}\n"
      "centroidal_inertia_kg_m2 = {}\nsim_dt_s = {}\ncontrol_dt_s = {}\n",
      p.mass, p.semi_major, p.semi_minor, p.gravity, p.torque_limit, p.centroidal_inertia(), cfg.clock.sim_dt,
      cfg.clock.control_dt());
}

}  // namespace ellroll::experiment
