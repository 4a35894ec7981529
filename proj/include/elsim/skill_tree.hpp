#ifndef ELSIM_SKILL_TREE_HPP_
#define ELSIM_SKILL_TREE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "elsim/discriminator.hpp"
#include "elsim/q_network.hpp"
#include "elsim/replay_buffer.hpp"
#include "elsim/skill_id.hpp"

namespace elsim {

// A node samples its next letter uniformly while its discriminator is
// still learning; after its children split it switches to exploitation,
// where the tree policy samples letters by Q-value. The transition
// happens exactly once.
enum class NodePhase { kLearning, kExploitation };

// Shapes and hyperparameters for the networks, buffers and trackers the
// tree creates when it grows.
struct TreeBuildParams {
  int obs_dim = 2;
  std::vector<int> hidden = {64, 64};
  int action_count = 4;
  std::size_t buffer_capacity = 10000;
  double tracker_beta = 0.02;
  Optimizer optimizer = Optimizer::kAdam;
};

struct SkillNode {
  SkillId id;
  NodePhase phase = NodePhase::kLearning;
  std::vector<std::unique_ptr<SkillNode>> children;  // empty or |V| entries

  // Internal nodes classify their children's letters.
  std::optional<Discriminator> discriminator;
  std::optional<PFinishTracker> p_finish;

  // Leaves act: they carry the behavior policy and its replay data.
  std::optional<ReplayBuffer> buffer;
  std::optional<QNetwork> policy;

  // Set once the split criterion fired; the split executes after every
  // child buffer received enough fresh data past the recorded marks.
  bool refill_pending = false;
  std::vector<std::uint64_t> refill_marks;

  bool is_leaf() const { return children.empty(); }
  bool children_are_leaves() const;
  int depth() const { return id.depth(); }
};

// The growing tree of skills. Splitting a leaf gives it |V| children that
// deep-copy its policy and buffer, and equips the former leaf with a
// fresh discriminator for the new letter position.
class SkillTree {
 public:
  // With create_first_level the root is split immediately: |V| depth-1
  // leaves with independently initialized policies and empty buffers.
  SkillTree(int vocab_size, int max_depth, TreeBuildParams params, std::uint64_t seed,
            bool create_first_level = true);

  // Splits the leaf at `id`. Children copy the leaf's policy and buffer
  // when it has them (the bare root does not; its children start fresh).
  // Rejects non-leaves and leaves at the depth cap.
  std::vector<SkillId> split_node(const SkillId& id);

  // Nodes from root to `id` inclusive.
  std::vector<const SkillNode*> path_nodes(const SkillId& id) const;
  std::vector<SkillNode*> path_nodes(const SkillId& id);

  // Ids of all childless nodes, in preorder.
  std::vector<SkillId> leaves() const;

  bool contains(const SkillId& id) const;
  SkillNode& node(const SkillId& id);
  const SkillNode& node(const SkillId& id) const;
  SkillNode& root() { return *root_; }
  const SkillNode& root() const { return *root_; }

  std::vector<SkillId> all_ids() const;      // preorder
  std::vector<SkillNode*> all_nodes();       // preorder
  std::vector<const SkillNode*> all_nodes() const;
  std::size_t node_count() const;

  int vocab_size() const { return vocab_size_; }
  int max_depth() const { return max_depth_; }
  const TreeBuildParams& build_params() const { return params_; }

  std::vector<int> discriminator_layer_sizes() const;
  std::vector<int> policy_layer_sizes() const;

 private:
  SkillNode* find(const SkillId& id) const;

  int vocab_size_;
  int max_depth_;
  TreeBuildParams params_;
  std::mt19937_64 rng_;
  std::unique_ptr<SkillNode> root_;
};

}  // namespace elsim

#endif  // ELSIM_SKILL_TREE_HPP_
