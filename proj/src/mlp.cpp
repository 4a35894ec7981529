#include "elsim/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace elsim {

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double z : logits) max_logit = std::max(max_logit, z);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double soft_max_value(std::span<const double> x, double temp) {
  if (x.empty()) throw std::domain_error("soft_max_value: empty input");
  double max_x = -std::numeric_limits<double>::infinity();
  for (double v : x) max_x = std::max(max_x, v);
  double sum = 0.0;
  for (double v : x) sum += std::exp(temp * (v - max_x));
  return max_x + std::log(sum) / temp;
}

namespace {

// log(sum exp(z)) with max subtraction; shared by the cross-entropy loss.
double log_sum_exp(std::span<const double> z) {
  double max_z = -std::numeric_limits<double>::infinity();
  for (double v : z) max_z = std::max(max_z, v);
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - max_z);
  return max_z + std::log(sum);
}

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

Mlp::Mlp(std::vector<int> layer_sizes, Optimizer opt)
    : layer_sizes_(std::move(layer_sizes)), optimizer_(opt) {
  if (layer_sizes_.size() < 2) throw std::domain_error("Mlp: need at least input and output layers");
  for (int s : layer_sizes_) {
    if (s <= 0) throw std::domain_error("Mlp: layer sizes must be positive");
  }
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    layer_offsets_.push_back(count);
    count += static_cast<std::size_t>(layer_sizes_[l + 1]) * layer_sizes_[l] + layer_sizes_[l + 1];
  }
  params_.assign(count, 0.0);
  adam_.m.assign(count, 0.0);
  adam_.v.assign(count, 0.0);
}

void Mlp::init_random(std::mt19937_64& rng) {
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* block = params_.data() + layer_offsets_[l];
    const std::size_t block_size = static_cast<std::size_t>(out) * in + out;
    for (std::size_t i = 0; i < block_size; ++i) block[i] = dist(rng);
  }
}

void Mlp::check_input(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_size()) {
    throw std::domain_error("Mlp: input dimension mismatch");
  }
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  check_input(x);
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* w = params_.data() + layer_offsets_[l];
    const double* b = w + static_cast<std::size_t>(out) * in;
    next.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
      next[o] = acc;
    }
    const bool hidden = l + 2 < layer_sizes_.size();
    if (hidden) {
      for (double& v : next) v = std::tanh(v);
    }
    cur.swap(next);
  }
  return cur;
}

void Mlp::forward_cached(std::span<const double> x,
                         std::vector<std::vector<double>>& activations) const {
  activations.resize(layer_sizes_.size());
  activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* w = params_.data() + layer_offsets_[l];
    const double* b = w + static_cast<std::size_t>(out) * in;
    auto& src = activations[l];
    auto& dst = activations[l + 1];
    dst.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * src[i];
      dst[o] = acc;
    }
    if (l + 2 < layer_sizes_.size()) {
      for (double& v : dst) v = std::tanh(v);
    }
  }
}

void Mlp::backward(const std::vector<std::vector<double>>& activations,
                   std::vector<double>& output_grad, std::vector<double>& grad) const {
  // output_grad holds dL/d(output) on entry and is reused as the running
  // delta while walking the layers backwards.
  std::vector<double> prev_delta;
  for (std::size_t l = layer_sizes_.size() - 1; l-- > 0;) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* w = params_.data() + layer_offsets_[l];
    double* gw = grad.data() + layer_offsets_[l];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    const auto& src = activations[l];
    for (int o = 0; o < out; ++o) {
      const double d = output_grad[o];
      double* grow = gw + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) grow[i] += d * src[i];
      gb[o] += d;
    }
    if (l == 0) break;
    prev_delta.assign(static_cast<std::size_t>(in), 0.0);
    for (int o = 0; o < out; ++o) {
      const double d = output_grad[o];
      const double* row = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) prev_delta[i] += row[i] * d;
    }
    // src holds tanh activations, so tanh' = 1 - a^2.
    for (int i = 0; i < in; ++i) prev_delta[i] *= 1.0 - src[i] * src[i];
    output_grad.swap(prev_delta);
  }
}

double Mlp::classifier_loss_grad(const TrainBatch& batch, std::vector<double>* grad) const {
  if (batch.inputs.empty()) throw std::domain_error("Mlp: empty batch");
  if (batch.labels.size() != batch.inputs.size()) {
    throw std::domain_error("Mlp: labels/inputs length mismatch");
  }
  if (grad) grad->assign(params_.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.inputs.size());
  double loss = 0.0;
  std::vector<std::vector<double>> activations;
  std::vector<double> delta;
  for (std::size_t s = 0; s < batch.inputs.size(); ++s) {
    const int label = batch.labels[s];
    if (label < 0 || label >= output_size()) throw std::domain_error("Mlp: label out of range");
    check_input(batch.inputs[s]);
    forward_cached(batch.inputs[s], activations);
    const auto& logits = activations.back();
    loss += (log_sum_exp(logits) - logits[label]) * inv_n;
    if (grad) {
      delta = softmax(logits);
      delta[label] -= 1.0;
      for (double& d : delta) d *= inv_n;
      backward(activations, delta, *grad);
    }
  }
  return loss;
}

double Mlp::regression_loss_grad(const TrainBatch& batch, std::vector<double>* grad) const {
  if (batch.inputs.empty()) throw std::domain_error("Mlp: empty batch");
  if (batch.regression.size() != batch.inputs.size()) {
    throw std::domain_error("Mlp: regression targets/inputs length mismatch");
  }
  if (grad) grad->assign(params_.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.inputs.size());
  double loss = 0.0;
  std::vector<std::vector<double>> activations;
  std::vector<double> delta;
  for (std::size_t s = 0; s < batch.inputs.size(); ++s) {
    const auto& target = batch.regression[s];
    if (target.index < 0 || target.index >= output_size()) {
      throw std::domain_error("Mlp: regression target index out of range");
    }
    check_input(batch.inputs[s]);
    forward_cached(batch.inputs[s], activations);
    const double diff = activations.back()[target.index] - target.value;
    loss += diff * diff * inv_n;
    if (grad) {
      delta.assign(static_cast<std::size_t>(output_size()), 0.0);
      delta[target.index] = 2.0 * diff * inv_n;
      backward(activations, delta, *grad);
    }
  }
  return loss;
}

void Mlp::apply_gradient(std::span<const double> grad, double lr) {
  if (optimizer_ == Optimizer::kSgd) {
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * grad[i];
    return;
  }
  adam_.t += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_.t));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_.t));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const double g = grad[i];
    adam_.m[i] = kAdamBeta1 * adam_.m[i] + (1.0 - kAdamBeta1) * g;
    adam_.v[i] = kAdamBeta2 * adam_.v[i] + (1.0 - kAdamBeta2) * g * g;
    const double m_hat = adam_.m[i] / bc1;
    const double v_hat = adam_.v[i] / bc2;
    params_[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEps);
  }
}

double Mlp::train_classifier_step(const TrainBatch& batch, double lr) {
  std::vector<double> grad;
  const double loss = classifier_loss_grad(batch, &grad);
  apply_gradient(grad, lr);
  return loss;
}

double Mlp::train_regression_step(const TrainBatch& batch, double lr) {
  std::vector<double> grad;
  const double loss = regression_loss_grad(batch, &grad);
  apply_gradient(grad, lr);
  return loss;
}

void Mlp::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) throw std::domain_error("Mlp: parameter count mismatch");
  params_.assign(params.begin(), params.end());
}

void Mlp::set_adam_state(AdamState state) {
  if (state.m.size() != params_.size() || state.v.size() != params_.size()) {
    throw std::domain_error("Mlp: optimizer state size mismatch");
  }
  adam_ = std::move(state);
}

namespace {

void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::domain_error("Mlp: truncated parameter stream");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64_le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64_le(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::domain_error("Mlp: truncated parameter stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void Mlp::save_params(std::ostream& out) const {
  write_u32_le(out, static_cast<std::uint32_t>(layer_sizes_.size()));
  for (int s : layer_sizes_) write_u32_le(out, static_cast<std::uint32_t>(s));
  for (double p : params_) write_f64_le(out, p);
}

void Mlp::load_params(std::istream& in) {
  const std::uint32_t n_layers = read_u32_le(in);
  if (n_layers != layer_sizes_.size()) throw std::domain_error("Mlp: layer count mismatch");
  for (int s : layer_sizes_) {
    if (read_u32_le(in) != static_cast<std::uint32_t>(s)) {
      throw std::domain_error("Mlp: layer size mismatch");
    }
  }
  for (double& p : params_) p = read_f64_le(in);
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (target.layer_sizes_ != online.layer_sizes_) {
    throw std::domain_error("polyak_update: layer shape mismatch");
  }
  if (tau < 0.0 || tau > 1.0) throw std::domain_error("polyak_update: tau outside [0,1]");
  for (std::size_t i = 0; i < target.params_.size(); ++i) {
    target.params_[i] = (1.0 - tau) * target.params_[i] + tau * online.params_[i];
  }
}

}  // namespace elsim
