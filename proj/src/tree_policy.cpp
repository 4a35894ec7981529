#include "elsim/tree_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "elsim/mlp.hpp"

namespace elsim {

void TreeQTable::init_node(const SkillId& node, int vocab, double init_value) {
  if (vocab <= 0) throw std::domain_error("TreeQTable: vocab size must be positive");
  if (edges_.count(node)) throw std::domain_error("TreeQTable: node already initialized");
  EdgeValues e;
  e.q.assign(static_cast<std::size_t>(vocab), init_value);
  e.n.assign(static_cast<std::size_t>(vocab), 0);
  edges_.emplace(node, std::move(e));
}

const EdgeValues& TreeQTable::edges(const SkillId& node) const {
  auto it = edges_.find(node);
  if (it == edges_.end()) throw std::domain_error("TreeQTable: unknown node '" + node.str() + "'");
  return it->second;
}

EdgeValues& TreeQTable::edges_mut(const SkillId& node) {
  return const_cast<EdgeValues&>(edges(node));
}

double TreeQTable::q(const SkillId& node, int letter) const {
  return edges(node).q.at(static_cast<std::size_t>(letter));
}

void TreeQTable::set_q(const SkillId& node, int letter, double value) {
  edges_mut(node).q.at(static_cast<std::size_t>(letter)) = value;
}

std::int64_t TreeQTable::count(const SkillId& node, int letter) const {
  return edges(node).n.at(static_cast<std::size_t>(letter));
}

void TreeQTable::increment_count(const SkillId& node, int letter) {
  edges_mut(node).n.at(static_cast<std::size_t>(letter)) += 1;
}

void TreeQTable::increment_updates(const SkillId& node) { edges_mut(node).updates += 1; }

std::int64_t TreeQTable::updates(const SkillId& node) const { return edges(node).updates; }

void TreeQTable::reset_values() {
  for (auto& [id, e] : edges_) {
    std::fill(e.q.begin(), e.q.end(), 0.0);
    std::fill(e.n.begin(), e.n.end(), 0);
    e.updates = 0;
  }
}

double mbie_eb(double q, std::int64_t n, double beta_explore) {
  if (n < 0) throw std::domain_error("mbie_eb: negative count");
  return q + beta_explore / std::sqrt(static_cast<double>(std::max<std::int64_t>(1, n)));
}

std::vector<double> letter_probs(const TreeQTable& qt, const SkillNode& node,
                                 const SelectOptions& opt) {
  if (node.is_leaf()) throw std::domain_error("letter_probs: node has no children");
  const std::size_t vocab = node.children.size();
  const bool uniform =
      node.children_are_leaves() || node.phase == NodePhase::kLearning ||
      (opt.warmup_updates && qt.updates(node.id) < *opt.warmup_updates);
  if (uniform) {
    return std::vector<double>(vocab, 1.0 / static_cast<double>(vocab));
  }
  std::vector<double> values(vocab);
  for (std::size_t v = 0; v < vocab; ++v) {
    const double q = qt.q(node.id, static_cast<int>(v));
    values[v] = opt.explore_bonus ? mbie_eb(q, qt.count(node.id, static_cast<int>(v)),
                                            *opt.explore_bonus)
                                  : q;
    values[v] *= opt.temp;
  }
  return softmax(values);
}

SkillId select_skill(const SkillTree& tree, TreeQTable& qt, const SelectOptions& opt,
                     std::mt19937_64& rng) {
  const SkillNode* node = &tree.root();
  if (node->is_leaf()) throw std::domain_error("select_skill: tree has no skills");
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  while (!node->is_leaf()) {
    const std::vector<double> probs = letter_probs(qt, *node, opt);
    const double u = dist(rng);
    double acc = 0.0;
    int letter = static_cast<int>(probs.size()) - 1;
    for (std::size_t v = 0; v < probs.size(); ++v) {
      acc += probs[v];
      if (u < acc) {
        letter = static_cast<int>(v);
        break;
      }
    }
    if (opt.increment_counts) qt.increment_count(node->id, letter);
    node = node->children[static_cast<std::size_t>(letter)].get();
  }
  return node->id;
}

double scale_return(double discounted_return, int episode_len) {
  if (episode_len <= 0) throw std::domain_error("scale_return: episode length must be positive");
  return discounted_return / static_cast<double>(episode_len);
}

void update_after_episode(TreeQTable& qt, const SkillTree& tree, const SkillId& leaf,
                          double r_tree, double lr_tree) {
  if (!tree.contains(leaf)) throw std::domain_error("update_after_episode: unknown leaf");
  if (leaf.is_root()) throw std::domain_error("update_after_episode: root is not a skill");
  SkillId node = leaf.parent();
  const int last = leaf.last_letter();
  qt.set_q(node, last, (1.0 - lr_tree) * qt.q(node, last) + lr_tree * r_tree);
  qt.increment_updates(node);
  // Ancestor edges hold the maximum over their child's outgoing edges.
  while (!node.is_root()) {
    const SkillId parent = node.parent();
    const EdgeValues& e = qt.edges(node);
    const double best = *std::max_element(e.q.begin(), e.q.end());
    qt.set_q(parent, node.last_letter(), best);
    qt.increment_updates(parent);
    node = parent;
  }
}

void init_children_q(TreeQTable& qt, const SkillId& new_parent, double parent_edge_value,
                     int vocab) {
  qt.init_node(new_parent, vocab, parent_edge_value);
}

SkillId greedy_leaf(const SkillTree& tree, const TreeQTable& qt) {
  const SkillNode* node = &tree.root();
  if (node->is_leaf()) throw std::domain_error("greedy_leaf: tree has no skills");
  while (!node->is_leaf()) {
    const EdgeValues& e = qt.edges(node->id);
    int best = 0;
    for (std::size_t v = 1; v < e.q.size(); ++v) {
      if (e.q[v] > e.q[static_cast<std::size_t>(best)]) best = static_cast<int>(v);
    }
    node = node->children[static_cast<std::size_t>(best)].get();
  }
  return node->id;
}

}  // namespace elsim
