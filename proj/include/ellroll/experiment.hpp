#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ellroll/config.hpp"
#include "ellroll/dqn.hpp"
#include "ellroll/metrics.hpp"

// Experiment orchestration behind the command-line subcommands. Every
// function writes into cfg.out_dir (created if missing) and returns what it
// wrote so callers and tests can inspect it without re-reading files.
namespace ellroll::experiment {

namespace fs = std::filesystem;

// Writes `<file>.meta.json` next to an output file: config hash, seed,
// command name, and the full resolved config text.
void write_sidecar(const fs::path& file, const RunConfig& cfg, const std::string& command);

[[nodiscard]] std::string run_id(const RunConfig& cfg);

struct TrainOutput {
  TrainingResult result;
  fs::path log;
  fs::path best_checkpoint;
  fs::path final_checkpoint;
  fs::path config_snapshot;
  fs::path reward_curve;
  double wall_seconds = 0.0;
};

// progress, when set, receives one line per episode.
TrainOutput cmd_train(const RunConfig& cfg, std::ostream* progress = nullptr);

struct EvalOutput {
  TrajectoryRecord trajectory;
  MetricRow metrics;
  fs::path trajectory_csv;
  fs::path phase_csv;
  fs::path metrics_csv;
};

// Greedy rollout of one full episode. Throws ConfigError if the checkpoint's
// layer sizes differ from the configured network.
EvalOutput cmd_eval(const RunConfig& cfg, const Checkpoint& checkpoint);
EvalOutput cmd_baseline(const RunConfig& cfg);

struct SweepCell {
  std::string id;          // e.g. "h2v-m20-a34"
  TaskId task;
  double mass_g;
  double semi_major_mm;
  std::optional<std::string> error;
  int best_epoch = -1;
  double best_avg_reward = 0.0;
  MetricReport rl;
  MetricReport su;
  std::vector<double> avg_rewards;
};

struct SweepRow {
  std::string parameter;  // "m" or "a"
  double value;
  const SweepCell* cell;
};

struct SweepOutput {
  std::vector<SweepCell> cells;  // unique physical configurations
  std::vector<SweepRow> rows;    // table order; the base body appears once per axis
  std::vector<std::string> trend_flags;
  fs::path table_csv;
  fs::path curves_csv;
  fs::path trends_txt;
};

// One-at-a-time grid: masses at the base semi-major axis, then semi-major
// axes at the base mass, for every sweep task. Each cell trains, evaluates
// its best checkpoint and runs the baseline in its own subdirectory. Cell
// failures are recorded and the sweep continues.
SweepOutput cmd_sweep(const RunConfig& cfg, std::ostream* progress = nullptr);

struct CompareEntry {
  std::string metric;  // "settling_time" or "error_band"
  std::string task;
  double mass_g, semi_major_mm, semi_minor_mm;
  std::optional<double> su;
  std::optional<double> rl;
};

struct CompareOutput {
  std::vector<CompareEntry> entries;
  std::string text;
  fs::path csv;
  fs::path txt;
};

// Pairs RL and SU metric rows by (task, m, a, b). Throws ConfigError listing
// every row that has no partner.
[[nodiscard]] std::vector<CompareEntry> compare_metrics(const std::vector<MetricRow>& rl,
                                                        const std::vector<MetricRow>& su);
[[nodiscard]] std::string render_comparison(const std::vector<CompareEntry>& entries);
CompareOutput cmd_compare(const RunConfig& cfg, const std::vector<MetricRow>& rl, const std::vector<MetricRow>& su);

struct HeatmapOutput {
  fs::path basic_csv;
  fs::path normalized_csv;
};
HeatmapOutput cmd_heatmap(const RunConfig& cfg, const std::optional<HeatmapGrid>& grid = std::nullopt);

// Human-readable SI dump of the resolved physics.
[[nodiscard]] std::string describe_physics(const RunConfig& cfg);

}  // namespace ellroll::experiment
