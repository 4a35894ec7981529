#ifndef ELSIM_TRAINER_HPP_
#define ELSIM_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "elsim/config.hpp"
#include "elsim/gridworld.hpp"
#include "elsim/intrinsic.hpp"
#include "elsim/metrics.hpp"
#include "elsim/skill_tree.hpp"
#include "elsim/tree_policy.hpp"

namespace elsim {

struct LearnStepResult {
  double disc_loss = std::numeric_limits<double>::quiet_NaN();
  double dqn_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<SkillId> trained_discriminators;
  std::vector<SkillId> trained_policies;
  bool skipped = false;
};

struct TransferResult {
  std::vector<MetricsRow> rows;
  std::vector<MetricsRow> baseline_rows;
};

// Binds the pieces into the full loop: tree-policy episodes feeding
// per-leaf buffers, discriminator/policy learning steps, split
// management with buffer refill, skill evaluation, and transfer onto a
// new task with frozen skills. Single-threaded; environments are cycled
// round-robin.
class Trainer {
 public:
  Trainer(GridSpec env_spec, ElsimConfig cfg);
  // Continues from a snapshot (evaluation and transfer entry point).
  Trainer(SkillTree tree, TreeQTable qtable, GridSpec env_spec, ElsimConfig cfg);

  // One task episode: select a leaf, roll its policy for episode_len
  // steps filling its buffer, update the tree policy, and feed the final
  // state's discriminator confidences to the readiness trackers.
  EpisodeOutcome run_episode();

  // One learning step: walk down with the tree policy, refresh traversed
  // exploitation discriminators with probability eta, then train the
  // reached node's discriminator and all of its children's policies on a
  // shared batch with freshly recomputed intrinsic rewards.
  LearnStepResult learning_step();

  // Fires pending splits: marks nodes whose readiness criterion holds,
  // waits for every child buffer to be refilled with fresh data, then
  // splits all children and moves the node to the exploitation phase.
  // Returns the ids of nodes that gained children.
  std::vector<SkillId> maybe_split();

  // Episode -> learning step -> split check, until `total_steps`
  // environment steps have accumulated. One metrics row per episode.
  void train(std::int64_t total_steps, const MetricsSink& sink = {},
             const std::function<bool(const Trainer&)>& stop = {});

  // Visit-count grids, one per tree node, `steps_per_skill` environment
  // steps each. Internal nodes descend uniformly to a leaf each episode;
  // policies keep their Boltzmann exploration.
  std::map<SkillId, DensityGrid> evaluate_skills(std::int64_t steps_per_skill);

  // Task transfer with frozen skills: resets the tree policy, then reruns
  // episodes with the count bonus enabled. No buffer writes, no learning
  // steps, no splits. A uniform-selection baseline over the same frozen
  // skills is recorded alongside.
  TransferResult run_transfer(std::int64_t total_steps, const MetricsSink& sink = {},
                              const MetricsSink& baseline_sink = {});

  const SkillTree& tree() const { return tree_; }
  SkillTree& tree() { return tree_; }
  const TreeQTable& qtable() const { return qtable_; }
  TreeQTable& qtable() { return qtable_; }
  const ElsimConfig& config() const { return cfg_; }
  const GridSpec& env_spec() const { return env_spec_; }
  std::int64_t total_env_steps() const { return steps_; }
  std::int64_t episodes() const { return episodes_; }
  IntrinsicRewardSpec reward_spec() const { return {cfg_.alpha, cfg_.log_floor}; }

 private:
  // Rolls one episode of the leaf's policy. When recording, transitions
  // are pushed into the leaf's buffer.
  EpisodeOutcome roll_leaf(GridWorld& env, SkillNode& leaf, bool record);
  void update_readiness(const SkillId& leaf, const Obs& final_state);
  bool train_ancestor_discriminator(SkillNode& node, LearnStepResult& result);
  int sample_letter(const std::vector<double>& probs);
  void warn_empty_buffer(const SkillId& id);

  ElsimConfig cfg_;
  GridSpec env_spec_;
  SkillTree tree_;
  TreeQTable qtable_;
  std::vector<GridWorld> envs_;
  std::mt19937_64 rng_;
  std::int64_t steps_ = 0;
  std::int64_t episodes_ = 0;
  int empty_buffer_warnings_ = 0;
};

// FNV-1a hash over the raw bytes of every policy and discriminator
// parameter in the tree; unchanged parameters hash identically.
std::uint64_t parameter_hash(const SkillTree& tree);

}  // namespace elsim

#endif  // ELSIM_TRAINER_HPP_
