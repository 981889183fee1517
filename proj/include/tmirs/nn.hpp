#pragma once

// Dense rectifier network shared by the forward and backward policies, with
// hand-written backpropagation and an Adam optimizer.
//
// Rows are samples: a layer computes X * W + b, with W of shape fan_in x fan_out.
// The output has twice the state length: the first half are forward-policy
// logits, the second half backward-policy logits.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tmirs::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kMaskedLogProb = -1e30;

struct PolicyParams {
  std::vector<int> dims;  // input, hidden..., output
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;
  double logz = 0.0;

  int input_size() const { return dims.front(); }
  int output_size() const { return dims.back(); }
  std::size_t layers() const { return weights.size(); }
  // Network weights and biases; log Z is not counted.
  std::size_t parameter_count() const;
  void validate() const;
};

std::vector<int> policy_dims(int state_size, const std::vector<int>& hidden);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases, logz = 0.
PolicyParams init_params(const std::vector<int>& dims, std::uint64_t seed);

// layers[0] is the input batch, layers[i] the post-activation of layer i and
// layers.back() the linear output.
struct Activations {
  std::vector<Matrix> layers;

  Activations() = default;
  Activations(const PolicyParams& params, Eigen::Index rows);
  Eigen::Index rows() const { return layers.front().rows(); }
  Matrix& input() { return layers.front(); }
  const Matrix& output() const { return layers.back(); }
};

// Evaluates rows [first, first + count) in place; their inputs must be set.
void forward_rows(const PolicyParams& params, Activations& acts, Eigen::Index first, Eigen::Index count);

Activations forward_batch(const PolicyParams& params, const Matrix& inputs);

struct ForwardResult {
  std::vector<double> forward_logits;
  std::vector<double> backward_logits;
  Activations cache;
};

ForwardResult forward(const PolicyParams& params, std::span<const double> state);

// Masked entries get kMaskedLogProb. Throws std::invalid_argument if nothing
// is allowed and std::domain_error on a non-finite allowed logit.
std::vector<double> masked_log_softmax(std::span<const double> logits, std::span<const std::uint8_t> mask);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;
  double logz = 0.0;

  static Gradients zeros_like(const PolicyParams& params);
  Gradients& operator+=(const Gradients& o);
  Gradients& operator*=(double s);
};

// Gradients of a loss whose derivative w.r.t. the network outputs is
// output_grad (same shape as acts.output()). logz is left at zero.
Gradients backprop(const PolicyParams& params, const Activations& acts, const Matrix& output_grad);

// Piecewise-constant learning rate keyed by episode count.
struct LrSchedule {
  // (until_episode exclusive, lr); the last lr applies beyond the last bound.
  std::vector<std::pair<std::uint64_t, double>> pieces{{0, 1e-2}};

  double at(std::uint64_t episode) const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double logz_lr_scale = 10.0;
};

struct OptimizerState {
  AdamConfig config;
  LrSchedule schedule;
  Gradients m;  // first moments, logz included
  Gradients v;
  std::uint64_t step = 0;
};

OptimizerState make_optimizer(const PolicyParams& params, AdamConfig config = {}, LrSchedule schedule = {});

void optimizer_step(PolicyParams& params, OptimizerState& state, const Gradients& grads, double lr);

}  // namespace tmirs::nn
