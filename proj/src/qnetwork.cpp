#include "ellroll/qnetwork.hpp"

#include <cmath>

#include "ellroll/errors.hpp"

namespace ellroll {

QNetwork::QNetwork(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.size() < 2) throw ConfigError("network needs at least an input and an output layer");
  for (int n : shape_) {
    if (n < 1) throw ConfigError("layer widths must be positive");
  }
  for (std::size_t i = 0; i + 1 < shape_.size(); ++i) {
    layers_.push_back({Eigen::MatrixXd::Zero(shape_[i + 1], shape_[i]), Eigen::VectorXd::Zero(shape_[i + 1])});
  }
}

QNetwork QNetwork::glorot_uniform(Rng& rng, std::vector<int> shape) {
  QNetwork net(std::move(shape));
  for (auto& layer : net.layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Row-major fill so the draw order matches the checkpoint layout.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = dist(rng);
    }
  }
  return net;
}

std::string QNetwork::shape_string() const {
  std::string s;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "->";
    s += std::to_string(shape_[i]);
  }
  return s;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool QNetwork::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd a = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::VectorXd z = layers_[i].weight * a + layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * a;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& x, Trace& trace) const {
  trace.activations.clear();
  trace.activations.reserve(layers_.size() + 1);
  trace.activations.push_back(x);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Eigen::MatrixXd z = layers_[i].weight * trace.activations.back();
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0);
    trace.activations.push_back(std::move(z));
  }
  return trace.activations.back();
}

std::vector<double> QNetwork::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
  }
  return flat;
}

void QNetwork::unflatten(const std::vector<double>& flat) {
  if (flat.size() != parameter_count()) {
    throw ConfigError("parameter vector has " + std::to_string(flat.size()) + " entries, network " + shape_string() +
                      " needs " + std::to_string(parameter_count()));
  }
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[k++];
  }
}

Eigen::Vector3d encode(const Observation& obs, bool normalize) {
  if (!normalize) return {obs.theta, obs.omega, obs.theta_ref};
  return {obs.theta / kPi, obs.omega / 10.0, obs.theta_ref / kPi};
}

ActionIndex argmax_action(const Eigen::VectorXd& q) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i) {
    if (q(i) > q(best)) best = i;
  }
  return ActionIndex(static_cast<int>(best));
}

ActionIndex greedy_action(const QNetwork& net, const Observation& obs, bool normalize) {
  return argmax_action(net.forward(encode(obs, normalize)));
}

}  // namespace ellroll
