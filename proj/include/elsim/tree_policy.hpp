#ifndef ELSIM_TREE_POLICY_HPP_
#define ELSIM_TREE_POLICY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "elsim/replay_buffer.hpp"
#include "elsim/skill_id.hpp"
#include "elsim/skill_tree.hpp"

namespace elsim {

// Outgoing edge values of one tree node: a Q-value and a visit count per
// letter, plus how many times the node's edges were written.
struct EdgeValues {
  std::vector<double> q;
  std::vector<std::int64_t> n;
  std::int64_t updates = 0;
};

// Task-level action values over tree edges. Entries exist exactly for
// the instantiated nodes with children.
class TreeQTable {
 public:
  TreeQTable() = default;

  void init_node(const SkillId& node, int vocab, double init_value = 0.0);
  bool has_node(const SkillId& node) const { return edges_.count(node) > 0; }

  double q(const SkillId& node, int letter) const;
  void set_q(const SkillId& node, int letter, double value);
  std::int64_t count(const SkillId& node, int letter) const;
  void increment_count(const SkillId& node, int letter);
  void increment_updates(const SkillId& node);
  std::int64_t updates(const SkillId& node) const;

  const EdgeValues& edges(const SkillId& node) const;
  EdgeValues& edges_mut(const SkillId& node);
  const std::map<SkillId, EdgeValues>& table() const { return edges_; }

  // Zeroes all Q-values, visit counts and update counters, keeping the
  // node structure. Used when the tree policy restarts on a new task.
  void reset_values();

 private:
  std::map<SkillId, EdgeValues> edges_;
};

// Count-based optimism bonus on an edge value.
double mbie_eb(double q, std::int64_t n, double beta_explore);

struct SelectOptions {
  double temp = 20.0;                       // Boltzmann coefficient
  std::optional<double> explore_bonus;      // MBIE-EB beta, when enabled
  bool increment_counts = true;
  // Nodes whose edges received fewer updates than this select uniformly
  // (used while the tree policy restarts on a transferred tree).
  std::optional<std::int64_t> warmup_updates;
};

// Letter distribution at one node under the selection rules: uniform in
// the learning phase and whenever the children are leaves, Boltzmann over
// (optionally bonus-adjusted) Q-values otherwise.
std::vector<double> letter_probs(const TreeQTable& qt, const SkillNode& node,
                                 const SelectOptions& opt);

// Walks the tree from the root, sampling one letter per node, and returns
// the reached leaf. Visit counts along the path are incremented unless
// disabled.
SkillId select_skill(const SkillTree& tree, TreeQTable& qt, const SelectOptions& opt,
                     std::mt19937_64& rng);

// r_tree: the episode's discounted return scaled by the maximal episode
// length.
double scale_return(double discounted_return, int episode_len);

// Convex update of the edge into the executed leaf, then a max-backup of
// every ancestor edge on the way to the root.
void update_after_episode(TreeQTable& qt, const SkillTree& tree, const SkillId& leaf,
                          double r_tree, double lr_tree);

// Fresh edges of a newly split node start at the value of the edge that
// led to it.
void init_children_q(TreeQTable& qt, const SkillId& new_parent, double parent_edge_value,
                     int vocab);

// Deterministic greedy descent (ties broken toward the lowest letter).
SkillId greedy_leaf(const SkillTree& tree, const TreeQTable& qt);

// What one task episode produced, as seen by the tree policy.
struct EpisodeOutcome {
  SkillId skill;
  double discounted_return = 0.0;
  Obs final_state;
};

}  // namespace elsim

#endif  // ELSIM_TREE_POLICY_HPP_
