#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "ellroll/environment.hpp"
#include "ellroll/rng.hpp"

namespace ellroll {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Fully connected Q-network: ReLU after every hidden layer, linear output.
// Inputs are column vectors (theta, omega, theta_ref); batches are
// column-stacked.
class QNetwork {
 public:
  static std::vector<int> default_shape() { return {3, 64, 64, 64, kNumActions}; }

  // All-zero parameters.
  explicit QNetwork(std::vector<int> shape = default_shape());

  // Uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static QNetwork glorot_uniform(Rng& rng, std::vector<int> shape = default_shape());

  [[nodiscard]] const std::vector<int>& shape() const { return shape_; }
  [[nodiscard]] std::string shape_string() const;
  [[nodiscard]] const std::vector<DenseLayer>& layers() const { return layers_; }
  [[nodiscard]] std::vector<DenseLayer>& layers() { return layers_; }
  [[nodiscard]] std::size_t parameter_count() const;
  [[nodiscard]] bool all_finite() const;

  [[nodiscard]] Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  [[nodiscard]] Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;

  // Keeps every layer's output (post-activation; last entry = Q values).
  struct Trace {
    std::vector<Eigen::MatrixXd> activations;  // activations[0] = input
  };
  [[nodiscard]] Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, Trace& trace) const;

  // Flat parameter view in layer order (weights row-major, then biases).
  [[nodiscard]] std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);

 private:
  std::vector<int> shape_;
  std::vector<DenseLayer> layers_;
};

// Same layout as QNetwork::layers().
using NetworkGradient = std::vector<DenseLayer>;

// Encodes an observation as a network input. With normalize, theta and
// theta_ref are divided by pi and omega by 10.
[[nodiscard]] Eigen::Vector3d encode(const Observation& obs, bool normalize = false);

// argmax with ties broken toward the lowest index.
[[nodiscard]] ActionIndex argmax_action(const Eigen::VectorXd& q);
[[nodiscard]] ActionIndex greedy_action(const QNetwork& net, const Observation& obs, bool normalize = false);

}  // namespace ellroll
