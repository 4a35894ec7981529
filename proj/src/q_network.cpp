#include "elsim/q_network.hpp"

#include <stdexcept>

namespace elsim {

QNetwork::QNetwork(std::vector<int> layer_sizes, Optimizer opt, std::mt19937_64& rng)
    : online_(layer_sizes, opt), target_(std::move(layer_sizes), opt) {
  online_.init_random(rng);
  target_.set_parameters(online_.parameters());
}

std::vector<double> boltzmann_probs(std::span<const double> q, double temp_coeff) {
  if (temp_coeff <= 0.0) throw std::domain_error("boltzmann_probs: coefficient must be positive");
  std::vector<double> scaled(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) scaled[i] = temp_coeff * q[i];
  return softmax(scaled);
}

int boltzmann_act(const QNetwork& q, std::span<const double> s, double temp_coeff,
                  std::mt19937_64& rng) {
  const std::vector<double> probs = boltzmann_probs(q.q_values(s), temp_coeff);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double u = dist(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    acc += probs[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::vector<double> dqn_targets(const QNetwork& q, std::span<const Transition* const> batch,
                                std::span<const double> rewards, double gamma,
                                double temp_coeff) {
  if (batch.size() != rewards.size()) {
    throw std::domain_error("dqn_targets: batch/reward length mismatch");
  }
  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    double y = rewards[i];
    if (!t.done) {
      const std::vector<double> next_q = q.target().forward(t.next_state);
      y += gamma * soft_max_value(next_q, temp_coeff);
    }
    targets[i] = y;
  }
  return targets;
}

double dqn_update(QNetwork& q, std::span<const Transition* const> batch,
                  std::span<const double> rewards, double gamma, double lr, double tau,
                  double temp_coeff) {
  if (batch.empty()) throw std::domain_error("dqn_update: empty batch");
  const std::vector<double> targets = dqn_targets(q, batch, rewards, gamma, temp_coeff);
  TrainBatch train;
  train.inputs.reserve(batch.size());
  train.regression.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    train.inputs.push_back(batch[i]->state);
    train.regression.push_back({batch[i]->action, targets[i]});
  }
  const double loss = q.online().train_regression_step(train, lr);
  polyak_update(q.target(), q.online(), tau);
  return loss;
}

}  // namespace elsim
