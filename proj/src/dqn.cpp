#include "ellroll/dqn.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ellroll/csv.hpp"
#include "ellroll/errors.hpp"

namespace ellroll {

void AgentHyperparams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(epsilon_min > 0.0 && epsilon_min <= epsilon_start && epsilon_start <= 1.0))
    throw ConfigError("epsilon bounds must satisfy 0 < eps_min <= eps0 <= 1");
  if (!(epsilon_decay > 0.0 && epsilon_decay < 1.0)) throw ConfigError("epsilon decay must be in (0, 1)");
  if (update_every < 1) throw ConfigError("update_every must be >= 1");
  if (target_sync_every < 1) throw ConfigError("target_sync_every must be >= 1");
  if (buffer_capacity < batch_size) throw ConfigError("buffer capacity must be >= batch_size");
  if (hidden.empty()) throw ConfigError("need at least one hidden layer");
}

std::vector<int> AgentHyperparams::network_shape() const {
  std::vector<int> shape{3};
  shape.insert(shape.end(), hidden.begin(), hidden.end());
  shape.push_back(kNumActions);
  return shape;
}

double epsilon_schedule(int decays, const AgentHyperparams& h) {
  double eps = h.epsilon_start;
  for (int i = 0; i < decays; ++i) eps = std::max(h.epsilon_min, eps * h.epsilon_decay);
  return eps;
}

ActionIndex select_action(const QNetwork& net, const Observation& obs, double epsilon, Rng& rng, bool normalize) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) return ActionIndex(std::uniform_int_distribution<int>(0, kNumActions - 1)(rng));
  return greedy_action(net, obs, normalize);
}

TransitionBatch make_batch(const std::vector<Transition>& transitions, bool normalize) {
  const auto n = static_cast<Eigen::Index>(transitions.size());
  TransitionBatch b{Eigen::MatrixXd(3, n), Eigen::MatrixXd(3, n), {}, Eigen::VectorXd(n), {}};
  b.actions.reserve(transitions.size());
  b.truncated.reserve(transitions.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[static_cast<std::size_t>(i)];
    b.states.col(i) = encode(t.state, normalize);
    b.next_states.col(i) = encode(t.next_state, normalize);
    b.actions.push_back(t.action.value());
    b.rewards(i) = t.reward;
    b.truncated.push_back(t.truncated);
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  storage_[next_] = t;
  next_ = (next_ + 1) % storage_.size();
  size_ = std::min(size_ + 1, storage_.size());
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size > size_) {
    throw UsageError("cannot sample " + std::to_string(batch_size) + " transitions from a buffer holding " +
                     std::to_string(size_));
  }
  std::vector<std::size_t> picked;
  picked.reserve(batch_size);
  std::unordered_set<std::size_t> seen;
  seen.reserve(batch_size * 2);
  for (std::size_t j = size_ - batch_size; j < size_; ++j) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    const std::size_t chosen = seen.count(t) ? j : t;
    seen.insert(chosen);
    picked.push_back(chosen);
  }
  return picked;
}

TransitionBatch ReplayBuffer::sample(std::size_t batch_size, Rng& rng, bool normalize) const {
  const auto idx = sample_indices(batch_size, rng);
  std::vector<Transition> picked;
  picked.reserve(idx.size());
  for (std::size_t i : idx) picked.push_back(storage_[i]);
  return make_batch(picked, normalize);
}

Eigen::VectorXd td_targets(const TransitionBatch& batch, const QNetwork& target, double gamma) {
  if (batch.size() == 0) throw UsageError("td_targets: empty batch");
  const Eigen::MatrixXd q_next = target.forward_batch(batch.next_states);
  return batch.rewards + gamma * q_next.colwise().maxCoeff().transpose();
}

double td_loss(const QNetwork& online, const TransitionBatch& batch, const Eigen::VectorXd& targets) {
  const Eigen::MatrixXd q = online.forward_batch(batch.states);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double d = targets(static_cast<Eigen::Index>(i)) - q(batch.actions[i], static_cast<Eigen::Index>(i));
    sum += d * d;
  }
  return sum / static_cast<double>(batch.size());
}

LossGradient td_loss_gradient(const QNetwork& online, const TransitionBatch& batch, const Eigen::VectorXd& targets) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  QNetwork::Trace trace;
  const Eigen::MatrixXd q = online.forward_batch(batch.states, trace);

  // dL/dQ is nonzero only at the action taken in each sample.
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q.rows(), n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = batch.actions[static_cast<std::size_t>(i)];
    const double err = targets(i) - q(a, i);
    loss += err * err;
    delta(a, i) = -2.0 * err / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);

  const auto& layers = online.layers();
  NetworkGradient grad(layers.size());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const Eigen::MatrixXd& input = trace.activations[k];
    grad[k].weight.noalias() = delta * input.transpose();
    grad[k].bias = delta.rowwise().sum();
    if (k == 0) break;
    Eigen::MatrixXd upstream = layers[k].weight.transpose() * delta;
    // ReLU: the stored activation is positive exactly where the pre-activation was.
    delta = (input.array() > 0.0).select(upstream, 0.0);
  }
  return {loss, std::move(grad)};
}

AdamOptimizer::AdamOptimizer(const QNetwork& net, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& l : net.layers()) {
    DenseLayer zero{Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())};
    m_.push_back(zero);
    v_.push_back(std::move(zero));
  }
}

void AdamOptimizer::apply(QNetwork& net, const NetworkGradient& grad) {
  auto& layers = net.layers();
  if (grad.size() != layers.size() || m_.size() != layers.size())
    throw UsageError("Adam: gradient/optimizer shape does not match network");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weight, grad[k].weight, m_[k].weight, v_[k].weight);
    update(layers[k].bias, grad[k].bias, m_[k].bias, v_[k].bias);
  }
}

void AdamOptimizer::restore(std::int64_t steps, std::vector<DenseLayer> m, std::vector<DenseLayer> v) {
  auto same_shape = [](const std::vector<DenseLayer>& x, const std::vector<DenseLayer>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].weight.rows() != y[i].weight.rows() || x[i].weight.cols() != y[i].weight.cols() ||
          x[i].bias.size() != y[i].bias.size())
        return false;
    }
    return true;
  };
  if (!same_shape(m, m_) || !same_shape(v, v_)) throw ConfigError("Adam moment shapes do not match the network");
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

double train_step(QNetwork& online, const QNetwork& target, AdamOptimizer& adam, const TransitionBatch& batch,
                  const AgentHyperparams& h) {
  if (batch.size() != static_cast<std::size_t>(h.batch_size)) {
    throw UsageError("train_step: batch has " + std::to_string(batch.size()) + " samples, expected " +
                     std::to_string(h.batch_size));
  }
  const Eigen::VectorXd y = td_targets(batch, target, h.gamma);
  LossGradient lg = td_loss_gradient(online, batch, y);
  if (!std::isfinite(lg.loss)) {
    throw NumericalError("TD loss is not finite (loss=" + std::to_string(lg.loss) +
                         ", Adam step=" + std::to_string(adam.steps()) + ")");
  }
  adam.apply(online, lg.gradient);
  if (!online.all_finite()) throw NumericalError("online network parameters became non-finite");
  return lg.loss;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

using nlohmann::json;

json layers_to_json(const std::vector<DenseLayer>& layers) {
  json out = json::array();
  for (const auto& l : layers) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weight.size()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    }
    out.push_back({{"rows", l.weight.rows()},
                   {"cols", l.weight.cols()},
                   {"weight", w},
                   {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  return out;
}

std::vector<DenseLayer> layers_from_json(const json& arr) {
  std::vector<DenseLayer> out;
  for (const auto& j : arr) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto w = j.at("weight").get<std::vector<double>>();
    const auto b = j.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows)
      throw ConfigError("checkpoint layer arrays do not match their declared shape");
    DenseLayer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) l.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      l.bias(r) = b[static_cast<std::size_t>(r)];
    }
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

void Checkpoint::write(std::ostream& out) const {
  json j;
  j["format_version"] = kFormatVersion;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["layer_sizes"] = network.shape();
  j["layers"] = layers_to_json(network.layers());
  j["adam"] = {{"step", optimizer.steps()},
               {"learning_rate", optimizer.learning_rate()},
               {"m", layers_to_json(optimizer.first_moment())},
               {"v", layers_to_json(optimizer.second_moment())}};
  j["episode"] = episode;
  j["best_avg_reward"] = best_avg_reward;
  out << j.dump(1) << '\n';
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write checkpoint '" + path + "'");
  write(f);
}

Checkpoint Checkpoint::read(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kFormatVersion)
      throw ConfigError("unsupported checkpoint format version " + j.at("format_version").dump());
    Checkpoint c;
    c.config_hash = j.at("config_hash").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.network = QNetwork(j.at("layer_sizes").get<std::vector<int>>());
    auto layers = layers_from_json(j.at("layers"));
    if (layers.size() != c.network.layers().size()) throw ConfigError("checkpoint layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& want = c.network.layers()[i];
      if (layers[i].weight.rows() != want.weight.rows() || layers[i].weight.cols() != want.weight.cols())
        throw ConfigError("checkpoint layer " + std::to_string(i) + " disagrees with layer_sizes");
    }
    c.network.layers() = std::move(layers);
    const auto& adam = j.at("adam");
    c.optimizer = AdamOptimizer(c.network, adam.at("learning_rate").get<double>());
    c.optimizer.restore(adam.at("step").get<std::int64_t>(), layers_from_json(adam.at("m")),
                        layers_from_json(adam.at("v")));
    c.episode = j.at("episode").get<int>();
    c.best_avg_reward = j.at("best_avg_reward").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open checkpoint '" + path + "'");
  return read(f);
}

// ---------------------------------------------------------------------------
// Training log

void write_training_log(std::ostream& out, const std::vector<EpisodeLog>& log) {
  out << "episode,avg_reward,epsilon,mean_loss,steps_in_target\n";
  for (const auto& e : log) {
    out << e.episode << ',' << csv::num(e.avg_reward) << ',' << csv::num(e.epsilon) << ','
        << (e.mean_loss ? csv::num(*e.mean_loss) : std::string()) << ',' << e.steps_in_target << '\n';
  }
}

std::vector<EpisodeLog> read_training_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "episode,avg_reward,epsilon,mean_loss,steps_in_target")
    throw ConfigError("training log: unexpected header '" + line + "'");
  std::vector<EpisodeLog> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 5) throw ConfigError("training log: expected 5 fields in '" + line + "'");
    EpisodeLog e;
    e.episode = std::stoi(f[0]);
    e.avg_reward = csv::parse_double(f[1]);
    e.epsilon = csv::parse_double(f[2]);
    if (!f[3].empty()) e.mean_loss = csv::parse_double(f[3]);
    e.steps_in_target = std::stoi(f[4]);
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training loop

TrainingResult train(const TaskSpec& task, const EllipseParams& params, const SimClock& clock,
                     const AgentHyperparams& h, const TrainingOptions& opts) {
  h.validate();
  if (opts.epochs < 1) throw ConfigError("epochs must be >= 1");

  RngStreams rng(opts.seed);
  QNetwork online = QNetwork::glorot_uniform(rng.init, h.network_shape());
  QNetwork target = online;
  AdamOptimizer adam(online, h.learning_rate);
  ReplayBuffer buffer(static_cast<std::size_t>(h.buffer_capacity));
  Environment env(task, params, clock, opts.reset_noise);

  auto snapshot = [&](int episode, double best) {
    return Checkpoint{opts.config_hash, opts.seed, online, adam, episode, best};
  };

  TrainingResult result;
  result.best = snapshot(-1, -std::numeric_limits<double>::infinity());
  double epsilon = h.epsilon_start;
  std::int64_t total_steps = 0;

  try {
    for (int episode = 0; episode < opts.epochs; ++episode) {
      Observation obs = env.reset();
      double reward_sum = 0.0;
      double loss_sum = 0.0;
      int updates = 0;
      int in_target = 0;
      bool done = false;
      while (!done) {
        const ActionIndex action = select_action(online, obs, epsilon, rng.exploration, h.normalize_observations);
        const StepResult step = env.step(action);
        buffer.push({obs, action, step.reward, step.observation, step.truncated});
        reward_sum += step.reward;
        if (step.reward > 0.0) ++in_target;
        ++total_steps;

        if (total_steps % h.update_every == 0 && buffer.size() >= static_cast<std::size_t>(h.batch_size)) {
          const TransitionBatch batch =
              buffer.sample(static_cast<std::size_t>(h.batch_size), rng.replay, h.normalize_observations);
          loss_sum += train_step(online, target, adam, batch, h);
          ++updates;
        }
        if (total_steps % h.target_sync_every == 0) target = online;

        obs = step.observation;
        done = step.truncated;
      }

      EpisodeLog row{episode, reward_sum / task.episode_steps(), epsilon,
                     updates ? std::optional<double>(loss_sum / updates) : std::nullopt, in_target};
      result.log.push_back(row);
      if (row.avg_reward > result.best.best_avg_reward) result.best = snapshot(episode, row.avg_reward);
      if (opts.on_episode) opts.on_episode(row);
      epsilon = std::max(h.epsilon_min, epsilon * h.epsilon_decay);
    }
  } catch (const NumericalError& e) {
    result.failure = e.what();
  }
  result.last = snapshot(result.log.empty() ? -1 : result.log.back().episode, result.best.best_avg_reward);
  return result;
}

}  // namespace ellroll
