#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "elsim/metrics.hpp"
#include "elsim/trainer.hpp"

using namespace elsim;

namespace {

ElsimConfig fast_config() {
  ElsimConfig cfg;
  cfg.n_envs = 1;
  cfg.buffer_size = 500;
  cfg.hidden = {8};
  cfg.batch_size = 8;
  cfg.seed = 12;
  return cfg;
}

// Parameters that pin the policy to one action: zero weights, a large
// bias on the chosen output. Boltzmann sampling then picks it always.
std::vector<double> forced_action_params(const Mlp& net, int action) {
  std::vector<double> params(net.parameter_count(), 0.0);
  const auto& sizes = net.layer_sizes();
  std::size_t bias_offset = 0;
  for (std::size_t l = 0; l + 2 < sizes.size(); ++l) {
    bias_offset += static_cast<std::size_t>(sizes[l + 1]) * sizes[l] + sizes[l + 1];
  }
  bias_offset += static_cast<std::size_t>(sizes.back()) * sizes[sizes.size() - 2];
  params[bias_offset + static_cast<std::size_t>(action)] = 50.0;
  return params;
}

void force_all_policies(Trainer& trainer, int action) {
  for (SkillNode* node : trainer.tree().all_nodes()) {
    if (!node->policy) continue;
    node->policy->online().set_parameters(forced_action_params(node->policy->online(), action));
    node->policy->target().set_parameters(node->policy->online().parameters());
  }
}

// Splits every current leaf once, keeping the Q-table consistent, and
// flips the finished parents to exploitation (what a real split does).
void grow_one_level(Trainer& trainer) {
  std::vector<SkillNode*> parents;
  for (SkillNode* node : trainer.tree().all_nodes()) {
    if (!node->is_leaf() && node->children_are_leaves()) parents.push_back(node);
  }
  for (SkillNode* parent : parents) {
    for (int v = 0; v < trainer.tree().vocab_size(); ++v) {
      const SkillId child = parent->id.child(v);
      const double edge = trainer.qtable().q(parent->id, v);
      trainer.tree().split_node(child);
      init_children_q(trainer.qtable(), child, edge, trainer.tree().vocab_size());
    }
    parent->phase = NodePhase::kExploitation;
  }
}

}  // namespace

TEST_CASE("a rewardless environment leaves the tree policy at zero") {
  Trainer trainer(make_empty(), fast_config());
  for (int i = 0; i < 5; ++i) {
    const EpisodeOutcome outcome = trainer.run_episode();
    CHECK(outcome.discounted_return == 0.0);
  }
  for (const auto& [id, edges] : trainer.qtable().table()) {
    for (double q : edges.q) CHECK(q == 0.0);
  }
}

TEST_CASE("each episode pushes episode_len transitions into the executed leaf") {
  Trainer trainer(make_empty(), fast_config());
  const EpisodeOutcome outcome = trainer.run_episode();
  CHECK(trainer.tree().node(outcome.skill).buffer->size() == 100);
  CHECK(trainer.total_env_steps() == 100);
  std::int64_t total = 0;
  for (const SkillId& leaf : trainer.tree().leaves()) {
    total += static_cast<std::int64_t>(trainer.tree().node(leaf).buffer->size());
  }
  CHECK(total == trainer.total_env_steps());
  CHECK(trainer.total_env_steps() == trainer.episodes() * 100);
}

TEST_CASE("a skill camped on the rewarded side earns the stated return") {
  // 10x1 corridor, reward on x >= 2. Forced-east policies enter at step 2
  // and stay: 99 rewarded steps.
  GridSpec spec;
  spec.width = 10;
  spec.height = 1;
  spec.start = {0, 0};
  for (int x = 2; x < 10; ++x) spec.reward_cells[{x, 0}] = 1.0;
  ElsimConfig cfg = fast_config();
  cfg.gamma_tree = 1.0;
  Trainer trainer(spec, cfg);
  force_all_policies(trainer, kEast);
  const EpisodeOutcome outcome = trainer.run_episode();
  CHECK(scale_return(outcome.discounted_return, cfg.episode_len) ==
        doctest::Approx(0.99).epsilon(1e-12));
}

TEST_CASE("readiness trackers only see the executed path letters") {
  Trainer trainer(make_empty(), fast_config());
  const EpisodeOutcome outcome = trainer.run_episode();
  const auto& estimates = trainer.tree().root().p_finish->estimates();
  const int executed = outcome.skill.letter(0);
  for (int v = 0; v < 4; ++v) {
    if (v == executed) {
      CHECK(estimates[static_cast<std::size_t>(v)] != 0.25);
    } else {
      CHECK(estimates[static_cast<std::size_t>(v)] == 0.25);
    }
  }
}

TEST_CASE("a depth-one tree trains the root and every leaf policy") {
  Trainer trainer(make_empty(), fast_config());
  for (int i = 0; i < 4; ++i) trainer.run_episode();
  LearnStepResult result;
  // All four leaf buffers may need a few more episodes to be non-empty.
  for (int i = 0; i < 30 && result.trained_policies.empty(); ++i) {
    trainer.run_episode();
    result = trainer.learning_step();
  }
  REQUIRE_FALSE(result.skipped);
  CHECK(result.trained_discriminators == std::vector<SkillId>{SkillId::root()});
  CHECK(result.trained_policies.size() == 4);
  CHECK(std::isfinite(result.disc_loss));
  CHECK(std::isfinite(result.dqn_loss));
}

TEST_CASE("eta gates ancestor discriminator refreshes") {
  ElsimConfig cfg = fast_config();
  cfg.eta = 0.0;
  Trainer trainer(make_empty(), cfg);
  for (int i = 0; i < 12; ++i) trainer.run_episode();
  grow_one_level(trainer);  // root now has internal children
  for (int i = 0; i < 20; ++i) {
    const LearnStepResult result = trainer.learning_step();
    if (result.skipped) continue;
    // Only the reached parent-of-leaves node trains.
    CHECK(result.trained_discriminators.size() == 1);
    CHECK_FALSE(result.trained_discriminators[0].is_root());
  }
}

TEST_CASE("eta of one refreshes every traversed exploitation ancestor") {
  ElsimConfig cfg = fast_config();
  cfg.eta = 1.0;
  Trainer trainer(make_empty(), cfg);
  for (int i = 0; i < 12; ++i) trainer.run_episode();
  grow_one_level(trainer);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const LearnStepResult result = trainer.learning_step();
    if (result.skipped) continue;
    REQUIRE(result.trained_discriminators.size() == 2);
    CHECK(result.trained_discriminators[0].is_root());
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("splits fire only after readiness and a full refill") {
  ElsimConfig cfg = fast_config();
  cfg.buffer_size = 300;  // three episodes per child refill the buffer
  cfg.min_refill = 1.0;
  Trainer trainer(make_empty(), cfg);
  // Nothing is ready yet.
  CHECK(trainer.maybe_split().empty());
  trainer.tree().root().p_finish->set_estimates({0.95, 0.95, 0.95, 0.95});
  CHECK(trainer.maybe_split().empty());  // marks the refill, cannot fire yet
  CHECK(trainer.tree().root().refill_pending);
  std::vector<SkillId> performed;
  for (int i = 0; i < 200 && performed.empty(); ++i) {
    trainer.run_episode();
    performed = trainer.maybe_split();
  }
  REQUIRE(performed.size() == 4);
  CHECK(trainer.tree().leaves().size() == 16);
  CHECK(trainer.tree().root().phase == NodePhase::kExploitation);
  CHECK_FALSE(trainer.tree().root().refill_pending);
  for (int v = 0; v < 4; ++v) {
    const SkillNode& child = trainer.tree().node(SkillId::root().child(v));
    CHECK(child.phase == NodePhase::kLearning);
    CHECK(child.discriminator.has_value());
    CHECK(trainer.qtable().has_node(child.id));
  }
}

TEST_CASE("the depth cap blocks splits outright") {
  ElsimConfig cfg = fast_config();
  cfg.max_depth = 1;
  cfg.buffer_size = 100;
  Trainer trainer(make_empty(), cfg);
  trainer.tree().root().p_finish->set_estimates({1.0, 1.0, 1.0, 1.0});
  for (int i = 0; i < 20; ++i) {
    trainer.run_episode();
    CHECK(trainer.maybe_split().empty());
  }
  CHECK_FALSE(trainer.tree().root().refill_pending);
  CHECK(trainer.tree().leaves().size() == 4);
}

TEST_CASE("selection frequencies match the node phase") {
  ElsimConfig cfg = fast_config();
  Trainer trainer(make_empty(), cfg);
  for (int i = 0; i < 12; ++i) trainer.run_episode();
  grow_one_level(trainer);
  // Root is exploitation now; bias its edges and count first letters.
  trainer.qtable().edges_mut(SkillId::root()).q = {0.2, 0.0, 0.0, 0.0};
  std::mt19937_64 rng(77);
  SelectOptions opt;
  opt.temp = cfg.alpha_tree;
  opt.increment_counts = false;
  std::map<int, int> first_letter;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    first_letter[select_skill(trainer.tree(), trainer.qtable(), opt, rng).letter(0)] += 1;
  }
  const auto expected = boltzmann_probs(std::vector<double>{0.2, 0.0, 0.0, 0.0}, cfg.alpha_tree);
  for (int v = 0; v < 4; ++v) {
    CHECK(std::abs(first_letter[v] / static_cast<double>(draws) - expected[v]) < 0.02);
  }
  // A learning-phase child still samples its letters uniformly.
  SkillNode& child = trainer.tree().node(SkillId::parse("0"));
  CHECK(child.phase == NodePhase::kLearning);
  std::map<int, int> second_letter;
  for (int i = 0; i < draws; ++i) {
    const SkillId chosen = select_skill(trainer.tree(), trainer.qtable(), opt, rng);
    if (chosen.letter(0) == 0) second_letter[chosen.letter(1)] += 1;
  }
  int child_draws = 0;
  for (const auto& [v, count] : second_letter) child_draws += count;
  for (int v = 0; v < 4; ++v) {
    CHECK(std::abs(second_letter[v] / static_cast<double>(child_draws) - 0.25) < 0.03);
  }
}

TEST_CASE("training runs are bit-reproducible") {
  auto run_csv = [] {
    ElsimConfig cfg = fast_config();
    cfg.seed = 99;
    Trainer trainer(make_empty(), cfg);
    std::ostringstream csv;
    csv << metrics_csv_header() << '\n';
    trainer.train(3000, [&](const MetricsRow& row) { csv << metrics_csv_line(row) << '\n'; });
    return csv.str();
  };
  const std::string first = run_csv();
  CHECK(first == run_csv());
  CHECK(first.substr(0, first.find('\n')) == "step,episode,skill,r_tree,disc_loss,dqn_loss,n_leaves");
}

TEST_CASE("evaluation grids account for every step") {
  ElsimConfig cfg = fast_config();
  Trainer trainer(make_empty(), cfg);
  const auto grids = trainer.evaluate_skills(500);
  REQUIRE(grids.size() == trainer.tree().node_count());
  for (const auto& [id, grid] : grids) {
    CHECK(grid.total() == 500);
    CHECK(grid.width == 19);
    CHECK(grid.height == 19);
  }
}

TEST_CASE("an immobilized policy concentrates all mass on the start cell") {
  GridSpec spec;
  spec.width = 1;
  spec.height = 1;
  spec.start = {0, 0};
  Trainer trainer(spec, fast_config());
  const auto grids = trainer.evaluate_skills(200);
  for (const auto& [id, grid] : grids) {
    CHECK(grid.at(0, 0) == 200);
  }
}

TEST_CASE("transfer freezes skills and emits the baseline") {
  ElsimConfig cfg = fast_config();
  Trainer trainer(make_vertical_wall(true), cfg);
  trainer.train(2000);
  const std::uint64_t hash_before = parameter_hash(trainer.tree());
  trainer.qtable().edges_mut(SkillId::root()).q = {0.5, 0.5, 0.5, 0.5};
  const TransferResult result = trainer.run_transfer(1500);
  CHECK(parameter_hash(trainer.tree()) == hash_before);
  CHECK(result.rows.size() == 15);
  CHECK(result.baseline_rows.size() == 15);
  for (const auto& row : result.rows) {
    CHECK(row.step == row.episode * 100);
    CHECK(std::isnan(row.disc_loss));
  }
  // The Q-table was restarted: counts reflect only the transfer episodes.
  std::int64_t count_sum = 0;
  for (int v = 0; v < 4; ++v) count_sum += trainer.qtable().count(SkillId::root(), v);
  CHECK(count_sum == 15);
}

TEST_CASE("metric rows format doubles in shortest round-trip form") {
  MetricsRow row;
  row.step = 100;
  row.episode = 1;
  row.skill = SkillId::parse("0-1-3");
  row.r_tree = 0.0198;
  row.disc_loss = std::numeric_limits<double>::quiet_NaN();
  row.dqn_loss = 1.5;
  row.n_leaves = 4;
  CHECK(metrics_csv_line(row) == "100,1,0-1-3,0.0198,nan,1.5,4");
}

TEST_CASE("histogram intersection measures overlap") {
  DensityGrid a(2, 1);
  DensityGrid b(2, 1);
  a.at(0, 0) = 10;
  b.at(1, 0) = 10;
  CHECK(histogram_intersection(a, b) == 0.0);
  CHECK(histogram_intersection(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  b.at(0, 0) = 10;
  b.at(1, 0) = 10;
  CHECK(histogram_intersection(a, b) == doctest::Approx(0.5).epsilon(1e-12));
}
