#ifndef ELSIM_Q_NETWORK_HPP_
#define ELSIM_Q_NETWORK_HPP_

#include <random>
#include <span>
#include <vector>

#include "elsim/mlp.hpp"
#include "elsim/replay_buffer.hpp"

namespace elsim {

// Online/target pair for action-value learning with Boltzmann sampling.
class QNetwork {
 public:
  // layer_sizes run from observation dimension to action count. The
  // target starts as a copy of the randomly initialized online net.
  QNetwork(std::vector<int> layer_sizes, Optimizer opt, std::mt19937_64& rng);

  int action_count() const { return online_.output_size(); }
  std::vector<double> q_values(std::span<const double> s) const { return online_.forward(s); }

  Mlp& online() { return online_; }
  const Mlp& online() const { return online_; }
  Mlp& target() { return target_; }
  const Mlp& target() const { return target_; }

 private:
  Mlp online_;
  Mlp target_;
};

// Sampling distribution proportional to exp(temp_coeff * q).
std::vector<double> boltzmann_probs(std::span<const double> q, double temp_coeff);

int boltzmann_act(const QNetwork& q, std::span<const double> s, double temp_coeff,
                  std::mt19937_64& rng);

// Bootstrap targets: y = r + gamma * (1 - done) * soft_max_value(Q_target(s'), temp).
// The soft maximum realizes the exploration entropy bonus in the values.
std::vector<double> dqn_targets(const QNetwork& q, std::span<const Transition* const> batch,
                                std::span<const double> rewards, double gamma,
                                double temp_coeff);

// One squared-error step of the online net toward the targets on the
// taken actions, followed by a polyak update of the target net.
// Returns the pre-step loss.
double dqn_update(QNetwork& q, std::span<const Transition* const> batch,
                  std::span<const double> rewards, double gamma, double lr, double tau,
                  double temp_coeff);

}  // namespace elsim

#endif  // ELSIM_Q_NETWORK_HPP_
