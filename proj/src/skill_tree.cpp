#include "elsim/skill_tree.hpp"

#include <stdexcept>

namespace elsim {

bool SkillNode::children_are_leaves() const {
  if (children.empty()) return false;
  for (const auto& c : children) {
    if (!c->is_leaf()) return false;
  }
  return true;
}

SkillTree::SkillTree(int vocab_size, int max_depth, TreeBuildParams params, std::uint64_t seed,
                     bool create_first_level)
    : vocab_size_(vocab_size), max_depth_(max_depth), params_(std::move(params)), rng_(seed) {
  if (vocab_size_ < 2) throw std::domain_error("SkillTree: vocabulary needs at least 2 letters");
  if (max_depth_ < 1) throw std::domain_error("SkillTree: max depth must be positive");
  root_ = std::make_unique<SkillNode>();
  root_->id = SkillId::root();
  if (create_first_level) split_node(SkillId::root());
}

std::vector<int> SkillTree::discriminator_layer_sizes() const {
  std::vector<int> sizes{params_.obs_dim};
  sizes.insert(sizes.end(), params_.hidden.begin(), params_.hidden.end());
  sizes.push_back(vocab_size_);
  return sizes;
}

std::vector<int> SkillTree::policy_layer_sizes() const {
  std::vector<int> sizes{params_.obs_dim};
  sizes.insert(sizes.end(), params_.hidden.begin(), params_.hidden.end());
  sizes.push_back(params_.action_count);
  return sizes;
}

SkillNode* SkillTree::find(const SkillId& id) const {
  SkillNode* node = root_.get();
  for (int letter : id.letters()) {
    if (letter < 0 || letter >= vocab_size_) return nullptr;
    if (node->children.empty()) return nullptr;
    node = node->children[static_cast<std::size_t>(letter)].get();
  }
  return node;
}

bool SkillTree::contains(const SkillId& id) const { return find(id) != nullptr; }

SkillNode& SkillTree::node(const SkillId& id) {
  SkillNode* n = find(id);
  if (!n) throw std::domain_error("SkillTree: unknown id '" + id.str() + "'");
  return *n;
}

const SkillNode& SkillTree::node(const SkillId& id) const {
  return const_cast<SkillTree*>(this)->node(id);
}

std::vector<SkillId> SkillTree::split_node(const SkillId& id) {
  SkillNode& parent = node(id);
  if (!parent.is_leaf()) throw std::domain_error("SkillTree: cannot split a non-leaf node");
  if (parent.depth() >= max_depth_) {
    throw std::domain_error("SkillTree: node is at the maximum depth");
  }
  parent.discriminator.emplace(parent.id, discriminator_layer_sizes(), params_.optimizer, rng_);
  parent.p_finish.emplace(vocab_size_, params_.tracker_beta);
  parent.children.reserve(static_cast<std::size_t>(vocab_size_));
  std::vector<SkillId> child_ids;
  for (int v = 0; v < vocab_size_; ++v) {
    auto child = std::make_unique<SkillNode>();
    child->id = parent.id.child(v);
    child->phase = NodePhase::kLearning;
    if (parent.policy) {
      child->policy = *parent.policy;  // deep copy, Q-values identical
    } else {
      child->policy.emplace(policy_layer_sizes(), params_.optimizer, rng_);
    }
    if (parent.buffer) {
      child->buffer = *parent.buffer;
    } else {
      child->buffer.emplace(params_.buffer_capacity);
    }
    child_ids.push_back(child->id);
    parent.children.push_back(std::move(child));
  }
  // The parent no longer acts itself; its children own the behavior.
  parent.policy.reset();
  parent.buffer.reset();
  return child_ids;
}

std::vector<SkillNode*> SkillTree::path_nodes(const SkillId& id) {
  SkillNode* n = find(id);
  if (!n) throw std::domain_error("SkillTree: unknown id '" + id.str() + "'");
  std::vector<SkillNode*> path;
  path.reserve(static_cast<std::size_t>(id.depth()) + 1);
  SkillNode* node = root_.get();
  path.push_back(node);
  for (int letter : id.letters()) {
    node = node->children[static_cast<std::size_t>(letter)].get();
    path.push_back(node);
  }
  return path;
}

std::vector<const SkillNode*> SkillTree::path_nodes(const SkillId& id) const {
  auto path = const_cast<SkillTree*>(this)->path_nodes(id);
  return {path.begin(), path.end()};
}

namespace {

template <typename NodeT, typename Fn>
void preorder(NodeT* node, Fn&& fn) {
  fn(node);
  for (const auto& child : node->children) preorder(child.get(), fn);
}

}  // namespace

std::vector<SkillId> SkillTree::leaves() const {
  std::vector<SkillId> out;
  preorder<const SkillNode>(root_.get(), [&](const SkillNode* n) {
    if (n->is_leaf()) out.push_back(n->id);
  });
  return out;
}

std::vector<SkillId> SkillTree::all_ids() const {
  std::vector<SkillId> out;
  preorder<const SkillNode>(root_.get(), [&](const SkillNode* n) { out.push_back(n->id); });
  return out;
}

std::vector<SkillNode*> SkillTree::all_nodes() {
  std::vector<SkillNode*> out;
  preorder<SkillNode>(root_.get(), [&](SkillNode* n) { out.push_back(n); });
  return out;
}

std::vector<const SkillNode*> SkillTree::all_nodes() const {
  std::vector<const SkillNode*> out;
  preorder<const SkillNode>(root_.get(), [&](const SkillNode* n) { out.push_back(n); });
  return out;
}

std::size_t SkillTree::node_count() const { return all_ids().size(); }

}  // namespace elsim
