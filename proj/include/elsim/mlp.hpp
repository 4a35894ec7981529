#ifndef ELSIM_MLP_HPP_
#define ELSIM_MLP_HPP_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace elsim {

// Numerically stable softmax (max subtraction). Output is positive and
// sums to 1; invariant to adding a constant to all logits.
std::vector<double> softmax(std::span<const double> logits);

// temp^-1 * log(sum_i exp(temp * x_i)), the soft maximum of x.
double soft_max_value(std::span<const double> x, double temp);

enum class Optimizer { kAdam, kSgd };

struct RegressionTarget {
  int index = 0;      // which output unit the value applies to
  double value = 0.0;
};

// A training batch. Classification steps read `labels`, regression steps
// read `regression`; inputs and targets must have equal, nonzero length.
struct TrainBatch {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  std::vector<RegressionTarget> regression;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

// Fully connected network with tanh hidden layers and a linear output
// layer. Parameters are plain doubles; every operation is deterministic
// given identical inputs, so trained nets are bit-reproducible.
class Mlp {
 public:
  explicit Mlp(std::vector<int> layer_sizes, Optimizer opt = Optimizer::kAdam);

  // Uniform fan-in init: each layer's weights and biases are drawn from
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  void init_random(std::mt19937_64& rng);

  std::vector<double> forward(std::span<const double> x) const;

  // One optimizer step on the mean cross-entropy of softmax(forward(x))
  // against integer labels. Returns the pre-step loss.
  double train_classifier_step(const TrainBatch& batch, double lr);

  // One optimizer step on the mean squared error of the target-indexed
  // outputs. Returns the pre-step loss.
  double train_regression_step(const TrainBatch& batch, double lr);

  // Loss and gradient without stepping; `grad` may be null for loss-only
  // evaluation. Also the reference point for finite-difference checks.
  double classifier_loss_grad(const TrainBatch& batch, std::vector<double>* grad) const;
  double regression_loss_grad(const TrainBatch& batch, std::vector<double>* grad) const;

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  std::size_t parameter_count() const { return params_.size(); }

  std::vector<double> parameters() const { return params_; }
  void set_parameters(std::span<const double> params);

  Optimizer optimizer_kind() const { return optimizer_; }
  const AdamState& adam_state() const { return adam_; }
  void set_adam_state(AdamState state);

  // Flat little-endian float64 parameter dump with a layer-size header.
  void save_params(std::ostream& out) const;
  void load_params(std::istream& in);

  friend void polyak_update(Mlp& target, const Mlp& online, double tau);

 private:
  void check_input(std::span<const double> x) const;
  void apply_gradient(std::span<const double> grad, double lr);
  // Forward pass keeping per-layer activations for backprop.
  void forward_cached(std::span<const double> x,
                      std::vector<std::vector<double>>& activations) const;
  // Backprop of an output-space gradient into `grad` (accumulating).
  void backward(const std::vector<std::vector<double>>& activations,
                std::vector<double>& output_grad, std::vector<double>& grad) const;

  std::vector<int> layer_sizes_;
  // Flat parameter vector: for each layer, row-major weights [out x in]
  // followed by biases [out].
  std::vector<double> params_;
  std::vector<std::size_t> layer_offsets_;  // offset of each layer's block
  Optimizer optimizer_;
  AdamState adam_;
};

// target <- (1 - tau) * target + tau * online, parameter-wise.
void polyak_update(Mlp& target, const Mlp& online, double tau);

}  // namespace elsim

#endif  // ELSIM_MLP_HPP_
