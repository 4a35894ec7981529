#include "elsim/discriminator.hpp"

#include <stdexcept>

namespace elsim {

Discriminator::Discriminator(SkillId owner, std::vector<int> layer_sizes, Optimizer opt,
                             std::mt19937_64& rng)
    : owner_(std::move(owner)), net_(std::move(layer_sizes), opt) {
  net_.init_random(rng);
}

std::vector<double> Discriminator::infer(std::span<const double> s_next) const {
  return softmax(net_.forward(s_next));
}

double Discriminator::train_step(const TrainBatch& batch, double lr) {
  return net_.train_classifier_step(batch, lr);
}

PFinishTracker::PFinishTracker(int vocab_size, double beta) : beta_(beta) {
  if (vocab_size <= 0) throw std::domain_error("PFinishTracker: vocab size must be positive");
  if (beta < 0.0 || beta > 1.0) throw std::domain_error("PFinishTracker: beta outside [0,1]");
  estimates_.assign(static_cast<std::size_t>(vocab_size), 1.0 / vocab_size);
}

double PFinishTracker::update(int letter, double q_final) {
  if (letter < 0 || letter >= static_cast<int>(estimates_.size())) {
    throw std::domain_error("PFinishTracker: letter out of range");
  }
  if (q_final < 0.0 || q_final > 1.0) {
    throw std::domain_error("PFinishTracker: probability outside [0,1]");
  }
  double& e = estimates_[static_cast<std::size_t>(letter)];
  e = (1.0 - beta_) * e + beta_ * q_final;
  return e;
}

void PFinishTracker::set_estimates(std::vector<double> estimates) {
  if (estimates.size() != estimates_.size()) {
    throw std::domain_error("PFinishTracker: estimate count mismatch");
  }
  estimates_ = std::move(estimates);
}

bool ready_to_split(const PFinishTracker& tracker, double delta) {
  if (delta < 0.0 || delta > 1.0) throw std::domain_error("ready_to_split: delta outside [0,1]");
  for (double e : tracker.estimates()) {
    if (e < delta) return false;
  }
  return true;
}

}  // namespace elsim
