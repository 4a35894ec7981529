#ifndef ELSIM_DISCRIMINATOR_HPP_
#define ELSIM_DISCRIMINATOR_HPP_

#include <random>
#include <span>
#include <vector>

#include "elsim/mlp.hpp"
#include "elsim/skill_id.hpp"

namespace elsim {

// Per-node classifier over the vocabulary: given a visited state, it
// infers which next letter the acting skill carries. Its log-probability
// is the intrinsic reward signal.
class Discriminator {
 public:
  // layer_sizes run from observation dimension to vocabulary size.
  Discriminator(SkillId owner, std::vector<int> layer_sizes, Optimizer opt,
                std::mt19937_64& rng);

  // softmax over the net's outputs; a valid probability vector over V.
  std::vector<double> infer(std::span<const double> s_next) const;

  // One cross-entropy step on (s_next, letter) pairs. Returns the loss.
  double train_step(const TrainBatch& batch, double lr);

  const SkillId& owner() const { return owner_; }
  int vocab_size() const { return net_.output_size(); }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  SkillId owner_;
  Mlp net_;
};

// Exponential moving average of the discriminator's confidence on final
// states, one estimate per letter value. All estimates reaching the
// threshold is the split-readiness criterion.
class PFinishTracker {
 public:
  // Estimates start at chance level 1/|V|.
  PFinishTracker(int vocab_size, double beta);

  // estimates[letter] <- (1 - beta) * estimates[letter] + beta * q_final.
  // Returns the updated estimate.
  double update(int letter, double q_final);

  const std::vector<double>& estimates() const { return estimates_; }
  double beta() const { return beta_; }
  void set_estimates(std::vector<double> estimates);

 private:
  std::vector<double> estimates_;
  double beta_;
};

// True iff every estimate is at or above delta.
bool ready_to_split(const PFinishTracker& tracker, double delta);

}  // namespace elsim

#endif  // ELSIM_DISCRIMINATOR_HPP_
