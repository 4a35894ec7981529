#include "elsim/intrinsic.hpp"

#include <algorithm>
#include <stdexcept>

namespace elsim {

double intrinsic_reward(const SkillTree& tree, const SkillId& g,
                        std::span<const double> s_next, const IntrinsicRewardSpec& spec) {
  if (spec.log_floor >= 0.0) throw std::domain_error("intrinsic_reward: log floor must be negative");
  const auto path = tree.path_nodes(g);
  if (!path.back()->is_leaf()) throw std::domain_error("intrinsic_reward: skill is not a leaf");
  const int k = g.depth() - 1;  // index of the last letter
  if (k < 0) throw std::domain_error("intrinsic_reward: root is not a skill");
  double ancestor_sum = 0.0;
  double last_term = 0.0;
  for (int i = 0; i <= k; ++i) {
    const SkillNode* holder = path[static_cast<std::size_t>(i)];
    const std::vector<double> probs = holder->discriminator->infer(s_next);
    const double term =
        std::max(std::log(probs[static_cast<std::size_t>(g.letter(i))]), spec.log_floor);
    if (i == k) {
      last_term = term;
    } else {
      ancestor_sum += term;
    }
  }
  return last_term + spec.alpha * ancestor_sum;
}

}  // namespace elsim
