#ifndef ELSIM_INTRINSIC_HPP_
#define ELSIM_INTRINSIC_HPP_

#include <cmath>
#include <span>

#include "elsim/skill_id.hpp"
#include "elsim/skill_tree.hpp"

namespace elsim {

struct IntrinsicRewardSpec {
  double alpha = 1.0;                 // weight of ancestor discriminations
  double log_floor = std::log(1e-4);  // clamp for log-probabilities, < 0
};

// Reward of leaf skill g at the visited state s_next: the clamped
// log-probability its parent's discriminator assigns to g's last letter,
// plus alpha times the same quantity summed over all earlier letters.
// Always <= 0 and >= (1 + alpha * (depth - 1)) * log_floor.
double intrinsic_reward(const SkillTree& tree, const SkillId& g,
                        std::span<const double> s_next, const IntrinsicRewardSpec& spec);

}  // namespace elsim

#endif  // ELSIM_INTRINSIC_HPP_
