#include "tmirs/nn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tmirs/rng.hpp"

namespace tmirs::nn {

std::size_t PolicyParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
  return n;
}

void PolicyParams::validate() const {
  if (dims.size() < 2) throw std::invalid_argument("network needs at least input and output layers");
  if (weights.size() != dims.size() - 1 || biases.size() != weights.size())
    throw std::invalid_argument("layer count does not match dims");
  if (dims.back() != 2 * dims.front())
    throw std::invalid_argument("output size must be twice the input size");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != dims[i] || weights[i].cols() != dims[i + 1] || biases[i].size() != dims[i + 1])
      throw std::invalid_argument("layer " + std::to_string(i) + " has inconsistent shape");
    if (!weights[i].allFinite() || !biases[i].allFinite())
      throw std::invalid_argument("layer " + std::to_string(i) + " has non-finite values");
  }
  if (!std::isfinite(logz)) throw std::invalid_argument("logz is not finite");
}

std::vector<int> policy_dims(int state_size, const std::vector<int>& hidden) {
  std::vector<int> dims{state_size};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(2 * state_size);
  return dims;
}

PolicyParams init_params(const std::vector<int>& dims, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("network needs at least input and output layers");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("layer widths must be positive");
  PolicyParams p;
  p.dims = dims;
  Rng rng = make_stream(seed, {0x6e6e});
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[i]));
    Matrix w(dims[i], dims[i + 1]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = bound * (2.0 * uniform01(rng) - 1.0);
    p.weights.push_back(std::move(w));
    p.biases.push_back(RowVector::Zero(dims[i + 1]));
  }
  return p;
}

Activations::Activations(const PolicyParams& params, Eigen::Index rows) {
  layers.reserve(params.dims.size());
  for (int d : params.dims) layers.emplace_back(Matrix::Zero(rows, d));
}

void forward_rows(const PolicyParams& params, Activations& acts, Eigen::Index first, Eigen::Index count) {
  const std::size_t n_layers = params.layers();
  for (std::size_t i = 0; i < n_layers; ++i) {
    auto out = acts.layers[i + 1].middleRows(first, count);
    out.noalias() = acts.layers[i].middleRows(first, count) * params.weights[i];
    out.rowwise() += params.biases[i];
    if (i + 1 < n_layers) out = out.cwiseMax(0.0);
  }
}

Activations forward_batch(const PolicyParams& params, const Matrix& inputs) {
  if (inputs.cols() != params.input_size()) throw std::invalid_argument("input width does not match the network");
  Activations acts(params, inputs.rows());
  acts.input() = inputs;
  forward_rows(params, acts, 0, inputs.rows());
  return acts;
}

ForwardResult forward(const PolicyParams& params, std::span<const double> state) {
  if (static_cast<int>(state.size()) != params.input_size())
    throw std::invalid_argument("state length does not match the network input");
  Matrix x(1, params.input_size());
  for (std::size_t j = 0; j < state.size(); ++j) x(0, static_cast<Eigen::Index>(j)) = state[j];
  ForwardResult r;
  r.cache = forward_batch(params, x);
  const auto& out = r.cache.output();
  const Eigen::Index half = params.input_size();
  r.forward_logits.assign(out.data(), out.data() + half);
  r.backward_logits.assign(out.data() + half, out.data() + 2 * half);
  return r;
}

std::vector<double> masked_log_softmax(std::span<const double> logits, std::span<const std::uint8_t> mask) {
  if (logits.size() != mask.size()) throw std::invalid_argument("logits and mask lengths differ");
  double hi = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!mask[i]) continue;
    if (!std::isfinite(logits[i])) throw std::domain_error("masked_log_softmax: non-finite logit");
    hi = std::max(hi, logits[i]);
    any = true;
  }
  if (!any)
    throw std::invalid_argument("masked_log_softmax: every entry is masked");
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    if (mask[i]) sum += std::exp(logits[i] - hi);
  const double lse = hi + std::log(sum);
  std::vector<double> out(logits.size(), kMaskedLogProb);
  for (std::size_t i = 0; i < logits.size(); ++i)
    if (mask[i]) out[i] = logits[i] - lse;
  return out;
}

Gradients Gradients::zeros_like(const PolicyParams& params) {
  Gradients g;
  for (std::size_t i = 0; i < params.layers(); ++i) {
    g.weights.push_back(Matrix::Zero(params.weights[i].rows(), params.weights[i].cols()));
    g.biases.push_back(RowVector::Zero(params.biases[i].size()));
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& o) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += o.weights[i];
    biases[i] += o.biases[i];
  }
  logz += o.logz;
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= s;
    biases[i] *= s;
  }
  logz *= s;
  return *this;
}

Gradients backprop(const PolicyParams& params, const Activations& acts, const Matrix& output_grad) {
  if (output_grad.rows() != acts.rows() || output_grad.cols() != params.output_size())
    throw std::invalid_argument("output gradient shape does not match the activations");
  Gradients g = Gradients::zeros_like(params);
  Matrix delta = output_grad;
  for (std::size_t i = params.layers(); i-- > 0;) {
    g.weights[i].noalias() = acts.layers[i].transpose() * delta;
    g.biases[i] = delta.colwise().sum();
    if (i > 0) {
      Matrix prev = delta * params.weights[i].transpose();
      delta = prev.cwiseProduct((acts.layers[i].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

double LrSchedule::at(std::uint64_t episode) const {
  if (pieces.empty()) throw std::logic_error("empty learning-rate schedule");
  for (const auto& [until, lr] : pieces)
    if (episode < until) return lr;
  return pieces.back().second;
}

OptimizerState make_optimizer(const PolicyParams& params, AdamConfig config, LrSchedule schedule) {
  return {config, std::move(schedule), Gradients::zeros_like(params), Gradients::zeros_like(params), 0};
}

void optimizer_step(PolicyParams& params, OptimizerState& state, const Gradients& grads, double lr) {
  const auto& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

  auto update = [&](auto& param, auto& m, auto& v, const auto& g, double step_lr) {
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    param.array() -= step_lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
  };
  for (std::size_t i = 0; i < params.layers(); ++i) {
    update(params.weights[i], state.m.weights[i], state.v.weights[i], grads.weights[i], lr);
    update(params.biases[i], state.m.biases[i], state.v.biases[i], grads.biases[i], lr);
  }
  const double z_lr = lr * c.logz_lr_scale;
  state.m.logz = c.beta1 * state.m.logz + (1.0 - c.beta1) * grads.logz;
  state.v.logz = c.beta2 * state.v.logz + (1.0 - c.beta2) * grads.logz * grads.logz;
  params.logz -= z_lr * (state.m.logz / bc1) / (std::sqrt(state.v.logz / bc2) + c.epsilon);
}

}  // namespace tmirs::nn
