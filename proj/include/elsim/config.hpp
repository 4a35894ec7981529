#ifndef ELSIM_CONFIG_HPP_
#define ELSIM_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "elsim/mlp.hpp"

namespace elsim {

// Run configuration. Defaults are the gridworld settings.
struct ElsimConfig {
  // Intra-skill learner.
  double gamma = 0.98;
  int buffer_size = 10000;
  std::vector<int> hidden = {64, 64};
  double lr = 0.001;
  int episode_len = 100;
  int batch_size = 64;
  int n_envs = 16;
  double tau = 0.005;
  double alpha_dqn = 1.0;  // Boltzmann coefficient of the skill policies

  // Skill refinement.
  double delta = 0.9;      // split-readiness threshold
  double eta = 0.5;        // refresh probability of ancestor discriminators
  double beta_ema = 0.02;  // readiness moving-average coefficient
  int vocab_size = 4;
  double alpha = 1.0;      // weight of ancestor terms in the intrinsic reward
  int max_depth = 10;
  double min_refill = 1.0;     // fraction of capacity in fresh data before a split
  double log_floor = -9.210340371976182;  // ln(1e-4)

  // Tree policy.
  double gamma_tree = 1.0;
  double alpha_tree = 20.0;  // Boltzmann coefficient over tree Q-values
  double lr_tree = 0.05;
  double beta_explore = 1.0;  // count-bonus weight, used by transfer runs
  int transfer_warmup = 20;   // per-node uniform updates at transfer start

  // Run control.
  std::int64_t total_steps = 2000000;
  std::uint64_t seed = 0;
  std::string optimizer = "adam";  // or "sgd"
  std::int64_t eval_steps_per_skill = 500;
  std::int64_t eval_interval = 0;  // episodes between skill evaluations; 0 = final only

  Optimizer optimizer_kind() const;
  void validate() const;
};

// Reads `key=value` lines (# comments allowed) or a JSON object whose
// keys mirror the field names. Unknown keys are rejected.
ElsimConfig load_config(const std::string& path);
ElsimConfig parse_config(std::istream& in);
std::string config_to_json(const ElsimConfig& cfg);

}  // namespace elsim

#endif  // ELSIM_CONFIG_HPP_
