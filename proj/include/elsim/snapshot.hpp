#ifndef ELSIM_SNAPSHOT_HPP_
#define ELSIM_SNAPSHOT_HPP_

#include <iosfwd>
#include <string>

#include "elsim/skill_tree.hpp"
#include "elsim/tree_policy.hpp"

namespace elsim {

// Tree snapshot: every node's id, phase, readiness estimates, refill
// state and network parameters (with optimizer state), plus the tree
// policy's Q-table. Doubles are written in shortest round-trip form, so
// save -> load -> save reproduces the document byte for byte. Replay
// buffers are not part of the snapshot.
struct Snapshot {
  SkillTree tree;
  TreeQTable qtable;
};

std::string snapshot_to_json(const SkillTree& tree, const TreeQTable& qtable);
void save_snapshot(const SkillTree& tree, const TreeQTable& qtable, const std::string& path);

Snapshot snapshot_from_json(const std::string& text);
Snapshot load_snapshot(const std::string& path);

}  // namespace elsim

#endif  // ELSIM_SNAPSHOT_HPP_
