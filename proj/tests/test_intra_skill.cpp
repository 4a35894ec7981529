#include <doctest.h>

#include <cmath>
#include <random>

#include "elsim/intrinsic.hpp"
#include "elsim/q_network.hpp"
#include "elsim/replay_buffer.hpp"
#include "elsim/skill_tree.hpp"

using namespace elsim;

namespace {

// softmax(20 * [0.1, 0.2]).
constexpr double kBoltzmannLow = 0.11920292202211756;
constexpr double kBoltzmannHigh = 0.88079707797788244;

Transition make_transition(double tag) {
  return Transition{{tag, tag}, 0, {tag, tag}, false};
}

TreeBuildParams tiny_params() {
  TreeBuildParams params;
  params.obs_dim = 2;
  params.hidden = {8};
  params.action_count = 3;
  params.buffer_capacity = 32;
  return params;
}

void zero_discriminators(SkillTree& tree) {
  for (SkillNode* node : tree.all_nodes()) {
    if (node->discriminator) {
      Mlp& net = node->discriminator->net();
      net.set_parameters(std::vector<double>(net.parameter_count(), 0.0));
    }
  }
}

}  // namespace

TEST_CASE("buffer evicts oldest first") {
  ReplayBuffer buffer(2);
  buffer.push(make_transition(1.0));
  buffer.push(make_transition(2.0));
  buffer.push(make_transition(3.0));
  REQUIRE(buffer.size() == 2);
  CHECK(buffer.at(0).state[0] == 2.0);
  CHECK(buffer.at(1).state[0] == 3.0);
  CHECK(buffer.total_pushes() == 3);
}

TEST_CASE("sampling a singleton returns that element") {
  ReplayBuffer buffer(8);
  buffer.push(make_transition(42.0));
  std::mt19937_64 rng(1);
  CHECK(buffer.sample_one(rng).state[0] == 42.0);
  const auto batch = buffer.sample(5, rng);
  for (const Transition* t : batch) CHECK(t->state[0] == 42.0);
}

TEST_CASE("sampling an empty buffer is an error") {
  ReplayBuffer buffer(4);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS((void)buffer.sample_one(rng), std::domain_error);
  CHECK_THROWS_AS((void)buffer.sample(3, rng), std::domain_error);
}

TEST_CASE("sampling is uniform over the buffer") {
  ReplayBuffer buffer(3);
  for (int i = 0; i < 3; ++i) buffer.push(make_transition(static_cast<double>(i)));
  std::mt19937_64 rng(2025);
  int counts[3] = {0, 0, 0};
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) {
    counts[static_cast<int>(buffer.sample_one(rng).state[0])] += 1;
  }
  // Chi-square against uniform; 18.42 is the 0.9999 quantile at 2 dof.
  const double expected = draws / 3.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 18.42);
}

TEST_CASE("equal Q-values sample actions uniformly") {
  const std::vector<double> q{0.7, 0.7, 0.7, 0.7};
  for (double p : boltzmann_probs(q, 1.0)) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("boltzmann probabilities match the two-action oracle") {
  const std::vector<double> q{0.1, 0.2};
  const auto probs = boltzmann_probs(q, 20.0);
  CHECK(probs[0] == doctest::Approx(kBoltzmannLow).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(kBoltzmannHigh).epsilon(1e-12));
}

TEST_CASE("a vanishing coefficient approaches the uniform distribution") {
  const std::vector<double> q{-3.0, 1.0, 4.0};
  for (double p : boltzmann_probs(q, 1e-12)) {
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("boltzmann probabilities are a distribution for any finite Q") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-500.0, 500.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(4);
    for (double& v : q) v = value(rng);
    double sum = 0.0;
    for (double p : boltzmann_probs(q, 1.0)) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("boltzmann action sampling follows the probabilities") {
  std::mt19937_64 rng(8);
  QNetwork q({2, 8, 4}, Optimizer::kAdam, rng);
  q.online().set_parameters(std::vector<double>(q.online().parameter_count(), 0.0));
  const std::vector<double> obs{0.5, 0.5};
  int counts[4] = {0, 0, 0, 0};
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) counts[boltzmann_act(q, obs, 1.0, rng)] += 1;
  const double expected = draws / 4.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.1);  // 0.9999 quantile at 3 dof
}

TEST_CASE("terminal transitions bootstrap nothing") {
  std::mt19937_64 rng(4);
  QNetwork q({2, 8, 4}, Optimizer::kAdam, rng);
  Transition done_t{{0.1, 0.1}, 2, {0.9, 0.9}, true};
  const Transition* batch[] = {&done_t};
  const double rewards[] = {-1.25};
  const auto targets = dqn_targets(q, batch, rewards, 0.98, 1.0);
  CHECK(targets[0] == -1.25);
}

TEST_CASE("zero nets and zero rewards target the soft maximum of zeros") {
  std::mt19937_64 rng(4);
  QNetwork q({2, 8, 4}, Optimizer::kAdam, rng);
  q.online().set_parameters(std::vector<double>(q.online().parameter_count(), 0.0));
  q.target().set_parameters(std::vector<double>(q.target().parameter_count(), 0.0));
  Transition t{{0.1, 0.1}, 0, {0.9, 0.9}, false};
  const Transition* batch[] = {&t};
  const double rewards[] = {0.0};
  for (double temp : {1.0, 2.0, 0.5}) {
    const auto targets = dqn_targets(q, batch, rewards, 1.0, temp);
    CHECK(targets[0] == doctest::Approx(std::log(4.0) / temp).epsilon(1e-12));
  }
}

TEST_CASE("value update moves the online net and tracks the target") {
  std::mt19937_64 rng(6);
  QNetwork q({2, 8, 4}, Optimizer::kAdam, rng);
  const std::vector<double> online_before = q.online().parameters();
  const std::vector<double> target_before = q.target().parameters();
  std::vector<Transition> transitions;
  std::vector<const Transition*> batch;
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int i = 0; i < 16; ++i) {
    transitions.push_back({{value(rng), value(rng)}, i % 4, {value(rng), value(rng)}, false});
  }
  for (const auto& t : transitions) batch.push_back(&t);
  const std::vector<double> rewards(16, -1.0);
  const double loss = dqn_update(q, batch, rewards, 0.98, 1e-3, 0.005, 1.0);
  CHECK(loss >= 0.0);
  CHECK(q.online().parameters() != online_before);
  // The target moved a tau-sized fraction toward the online net.
  const auto target_after = q.target().parameters();
  const auto online_after = q.online().parameters();
  for (std::size_t i = 0; i < target_after.size(); ++i) {
    const double expected = (1.0 - 0.005) * target_before[i] + 0.005 * online_after[i];
    CHECK(target_after[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)dqn_update(q, batch, std::vector<double>(3, 0.0), 0.98, 1e-3, 0.005, 1.0),
                  std::domain_error);
}

TEST_CASE("uniform discriminators give depth times log(1/V)") {
  SkillTree tree(4, 5, tiny_params(), 11);
  tree.split_node(SkillId::parse("1"));
  zero_discriminators(tree);
  const IntrinsicRewardSpec spec{1.0, std::log(1e-4)};
  const std::vector<double> obs{0.4, 0.6};

  const double depth1 = intrinsic_reward(tree, SkillId::parse("0"), obs, spec);
  CHECK(depth1 == doctest::Approx(std::log(0.25)).epsilon(1e-12));

  const double depth2 = intrinsic_reward(tree, SkillId::parse("1-2"), obs, spec);
  CHECK(depth2 == doctest::Approx(-2.7725887222397812).epsilon(1e-12));
}

TEST_CASE("the floor clamps each term separately") {
  SkillTree tree(4, 5, tiny_params(), 11);
  tree.split_node(SkillId::parse("1"));
  zero_discriminators(tree);
  const IntrinsicRewardSpec spec{1.0, -0.5};  // above ln(1/4)
  const std::vector<double> obs{0.4, 0.6};
  CHECK(intrinsic_reward(tree, SkillId::parse("1-2"), obs, spec) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("reward of a non-leaf or the root is rejected") {
  SkillTree tree(4, 5, tiny_params(), 11);
  tree.split_node(SkillId::parse("1"));
  const IntrinsicRewardSpec spec;
  const std::vector<double> obs{0.4, 0.6};
  CHECK_THROWS_AS((void)intrinsic_reward(tree, SkillId::parse("1"), obs, spec),
                  std::domain_error);
  CHECK_THROWS_AS((void)intrinsic_reward(tree, SkillId::root(), obs, spec), std::domain_error);
}

TEST_CASE("reward decomposes over the path and respects its bounds") {
  std::mt19937_64 rng(41);
  SkillTree tree(3, 6, tiny_params(), 19);
  tree.split_node(SkillId::parse("0"));
  tree.split_node(SkillId::parse("0-1"));
  const IntrinsicRewardSpec spec{0.7, std::log(1e-4)};
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> obs{value(rng), value(rng)};
    const SkillId g = SkillId::parse("0-1-2");
    const double reward = intrinsic_reward(tree, g, obs, spec);
    // Independent recomputation straight from the discriminators.
    double expected = 0.0;
    const auto path = tree.path_nodes(g);
    for (int i = 0; i < g.depth(); ++i) {
      const double p = path[static_cast<std::size_t>(i)]
                           ->discriminator->infer(obs)[static_cast<std::size_t>(g.letter(i))];
      const double term = std::max(std::log(p), spec.log_floor);
      expected += i == g.depth() - 1 ? term : spec.alpha * term;
    }
    CHECK(reward == doctest::Approx(expected).epsilon(1e-12));
    CHECK(reward <= 0.0);
    CHECK(reward >= (1.0 + spec.alpha * (g.depth() - 1)) * spec.log_floor);
  }
}

TEST_CASE("with alpha one the reward telescopes over prefixes") {
  std::mt19937_64 rng(43);
  SkillTree tree(2, 6, tiny_params(), 23);
  tree.split_node(SkillId::parse("1"));
  const IntrinsicRewardSpec spec{1.0, std::log(1e-4)};
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> obs{value(rng), value(rng)};
    const SkillId child = SkillId::parse("1-0");
    const SkillId parent = SkillId::parse("1");
    // Parent term computed directly from its holder's discriminator.
    const auto path = tree.path_nodes(parent);
    double parent_reward = 0.0;
    for (int i = 0; i < parent.depth(); ++i) {
      const double p = path[static_cast<std::size_t>(i)]
                           ->discriminator->infer(obs)[static_cast<std::size_t>(parent.letter(i))];
      parent_reward += std::max(std::log(p), spec.log_floor);
    }
    const double last =
        std::max(std::log(tree.node(parent).discriminator->infer(obs)[0]), spec.log_floor);
    CHECK(intrinsic_reward(tree, child, obs, spec) ==
          doctest::Approx(parent_reward + last).epsilon(1e-12));
  }
}
