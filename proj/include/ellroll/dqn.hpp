#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ellroll/environment.hpp"
#include "ellroll/qnetwork.hpp"
#include "ellroll/rng.hpp"

namespace ellroll {

struct AgentHyperparams {
  double gamma = 0.99;
  double learning_rate = 1e-3;
  int batch_size = 1024;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.995;
  int update_every = 10;          // environment steps between gradient updates
  int target_sync_every = 1000;   // environment steps between hard target copies
  int buffer_capacity = 100000;
  bool normalize_observations = false;
  std::vector<int> hidden = {64, 64, 64};

  void validate() const;
  [[nodiscard]] std::vector<int> network_shape() const;
};

// Epsilon after `decays` applications of eps <- max(eps_min, eps * decay).
[[nodiscard]] double epsilon_schedule(int decays, const AgentHyperparams& h);

// Always consumes one uniform draw; a second draw picks the random action.
[[nodiscard]] ActionIndex select_action(const QNetwork& net, const Observation& obs, double epsilon, Rng& rng,
                                        bool normalize = false);

struct Transition {
  Observation state;
  ActionIndex action{1};
  double reward = 0.0;
  Observation next_state;
  bool truncated = false;
};

struct TransitionBatch {
  Eigen::MatrixXd states;       // 3 x N, encoded
  Eigen::MatrixXd next_states;  // 3 x N, encoded
  std::vector<int> actions;
  Eigen::VectorXd rewards;
  std::vector<bool> truncated;

  [[nodiscard]] std::size_t size() const { return actions.size(); }
};

[[nodiscard]] TransitionBatch make_batch(const std::vector<Transition>& transitions, bool normalize = false);

// Fixed-capacity ring buffer with uniform sampling (no repeats inside one
// minibatch).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t capacity() const { return storage_.size(); }
  [[nodiscard]] const Transition& at(std::size_t i) const { return storage_[i]; }

  // Floyd's algorithm. Throws UsageError if size() < batch_size.
  [[nodiscard]] std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
  [[nodiscard]] TransitionBatch sample(std::size_t batch_size, Rng& rng, bool normalize = false) const;

 private:
  std::vector<Transition> storage_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
};

// y_i = r_i + gamma * max_a Q_target(s'_i, a). Time-limit truncation is not a
// terminal state, so every sample bootstraps.
[[nodiscard]] Eigen::VectorXd td_targets(const TransitionBatch& batch, const QNetwork& target, double gamma);

// Mean squared TD error over the batch, using only the taken action's Q.
[[nodiscard]] double td_loss(const QNetwork& online, const TransitionBatch& batch, const Eigen::VectorXd& targets);

struct LossGradient {
  double loss = 0.0;
  NetworkGradient gradient;
};
[[nodiscard]] LossGradient td_loss_gradient(const QNetwork& online, const TransitionBatch& batch,
                                            const Eigen::VectorXd& targets);

class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const QNetwork& net, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  void apply(QNetwork& net, const NetworkGradient& grad);

  [[nodiscard]] std::int64_t steps() const { return t_; }
  [[nodiscard]] double learning_rate() const { return lr_; }
  [[nodiscard]] const std::vector<DenseLayer>& first_moment() const { return m_; }
  [[nodiscard]] const std::vector<DenseLayer>& second_moment() const { return v_; }

  // Restores saved state; shapes must match the moment arrays.
  void restore(std::int64_t steps, std::vector<DenseLayer> m, std::vector<DenseLayer> v);

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
};

// One minibatch update of the online network. Throws NumericalError on a
// non-finite loss or parameters.
double train_step(QNetwork& online, const QNetwork& target, AdamOptimizer& adam, const TransitionBatch& batch,
                  const AgentHyperparams& h);

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  std::string config_hash;
  std::uint64_t seed = 0;
  QNetwork network;
  AdamOptimizer optimizer;
  int episode = -1;  // episode the snapshot was taken after
  double best_avg_reward = 0.0;

  void save(const std::string& path) const;
  void write(std::ostream& out) const;
  static Checkpoint load(const std::string& path);
  static Checkpoint read(std::istream& in);
};

struct EpisodeLog {
  int episode = 0;
  double avg_reward = 0.0;
  double epsilon = 0.0;
  std::optional<double> mean_loss;  // absent when no update happened
  int steps_in_target = 0;          // steps with positive reward
};

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log);
[[nodiscard]] std::vector<EpisodeLog> read_training_log(std::istream& in);

struct TrainingResult {
  std::vector<EpisodeLog> log;
  Checkpoint best;
  Checkpoint last;
  std::optional<std::string> failure;  // set when a numerical blow-up aborted the run
};

struct TrainingOptions {
  int epochs = 1000;
  std::uint64_t seed = 0;
  std::string config_hash;
  ResetNoise reset_noise;
  std::function<void(const EpisodeLog&)> on_episode;
};

// Runs `epochs` episodes of DQN on one task. Epsilon decays once per episode;
// the best checkpoint is the snapshot after the episode with the highest
// average reward so far.
[[nodiscard]] TrainingResult train(const TaskSpec& task, const EllipseParams& params, const SimClock& clock,
                                   const AgentHyperparams& h, const TrainingOptions& opts);

}  // namespace ellroll
