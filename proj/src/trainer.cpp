#include "elsim/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <stdexcept>

namespace elsim {

namespace {

constexpr std::uint64_t kTreeSeedSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kBaselineSeedSalt = 0xd1b54a32d192ed03ULL;
constexpr int kMaxEmptyBufferWarnings = 5;

TreeBuildParams build_params_from(const ElsimConfig& cfg) {
  TreeBuildParams params;
  params.obs_dim = 2;
  params.hidden = cfg.hidden;
  params.action_count = kGridActionCount;
  params.buffer_capacity = static_cast<std::size_t>(cfg.buffer_size);
  params.tracker_beta = cfg.beta_ema;
  params.optimizer = cfg.optimizer_kind();
  return params;
}

}  // namespace

Trainer::Trainer(GridSpec env_spec, ElsimConfig cfg)
    : cfg_(std::move(cfg)), env_spec_(std::move(env_spec)),
      tree_(cfg_.vocab_size, cfg_.max_depth, build_params_from(cfg_), cfg_.seed ^ kTreeSeedSalt),
      rng_(cfg_.seed) {
  cfg_.validate();
  qtable_.init_node(SkillId::root(), cfg_.vocab_size);
  envs_.assign(static_cast<std::size_t>(cfg_.n_envs), GridWorld(env_spec_));
}

Trainer::Trainer(SkillTree tree, TreeQTable qtable, GridSpec env_spec, ElsimConfig cfg)
    : cfg_(std::move(cfg)), env_spec_(std::move(env_spec)), tree_(std::move(tree)),
      qtable_(std::move(qtable)), rng_(cfg_.seed) {
  cfg_.validate();
  if (tree_.build_params().action_count != kGridActionCount) {
    throw std::domain_error("Trainer: tree action count does not match the environment");
  }
  envs_.assign(static_cast<std::size_t>(cfg_.n_envs), GridWorld(env_spec_));
}

int Trainer::sample_letter(const std::vector<double>& probs) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double u = dist(rng_);
  double acc = 0.0;
  for (std::size_t v = 0; v < probs.size(); ++v) {
    acc += probs[v];
    if (u < acc) return static_cast<int>(v);
  }
  return static_cast<int>(probs.size()) - 1;
}

EpisodeOutcome Trainer::roll_leaf(GridWorld& env, SkillNode& leaf, bool record) {
  EpisodeOutcome outcome;
  outcome.skill = leaf.id;
  Obs obs = env.reset();
  double discount = 1.0;
  for (int t = 0; t < cfg_.episode_len; ++t) {
    const int action = boltzmann_act(*leaf.policy, obs, cfg_.alpha_dqn, rng_);
    StepResult sr = env.step(action);
    if (record) {
      // The leaf's buffer is the only thing rollouts write.
      leaf.buffer->push({obs, action, sr.next_obs, sr.done});
    }
    outcome.discounted_return += discount * sr.extrinsic_reward;
    discount *= cfg_.gamma_tree;
    obs = std::move(sr.next_obs);
  }
  outcome.final_state = std::move(obs);
  return outcome;
}

void Trainer::update_readiness(const SkillId& leaf, const Obs& final_state) {
  auto path = tree_.path_nodes(leaf);
  for (int i = 0; i < leaf.depth(); ++i) {
    SkillNode* holder = path[static_cast<std::size_t>(i)];
    if (!holder->discriminator || !holder->p_finish) continue;
    const int letter = leaf.letter(i);
    const double q = holder->discriminator->infer(final_state)[static_cast<std::size_t>(letter)];
    holder->p_finish->update(letter, q);
  }
}

EpisodeOutcome Trainer::run_episode() {
  GridWorld& env = envs_[static_cast<std::size_t>(episodes_ % cfg_.n_envs)];
  SelectOptions opt;
  opt.temp = cfg_.alpha_tree;
  const SkillId leaf_id = select_skill(tree_, qtable_, opt, rng_);
  SkillNode& leaf = tree_.node(leaf_id);
  EpisodeOutcome outcome = roll_leaf(env, leaf, /*record=*/true);
  const double r_tree = scale_return(outcome.discounted_return, cfg_.episode_len);
  update_after_episode(qtable_, tree_, leaf_id, r_tree, cfg_.lr_tree);
  update_readiness(leaf_id, outcome.final_state);
  steps_ += cfg_.episode_len;
  episodes_ += 1;
  return outcome;
}

void Trainer::warn_empty_buffer(const SkillId& id) {
  if (empty_buffer_warnings_ < kMaxEmptyBufferWarnings) {
    std::cerr << "elsim: skipping learning at node '" << id
              << "': a descendant buffer is still empty\n";
  }
  ++empty_buffer_warnings_;
}

bool Trainer::train_ancestor_discriminator(SkillNode& node, LearnStepResult& result) {
  TrainBatch batch;
  batch.inputs.reserve(static_cast<std::size_t>(cfg_.batch_size));
  batch.labels.reserve(static_cast<std::size_t>(cfg_.batch_size));
  std::uniform_int_distribution<int> letter_dist(0, tree_.vocab_size() - 1);
  for (int i = 0; i < cfg_.batch_size; ++i) {
    // Recursive uniform descent to a leaf buffer.
    SkillNode* cur = &node;
    while (!cur->is_leaf()) {
      cur = cur->children[static_cast<std::size_t>(letter_dist(rng_))].get();
    }
    if (cur->buffer->empty()) {
      warn_empty_buffer(node.id);
      return false;
    }
    const Transition& t = cur->buffer->sample_one(rng_);
    batch.inputs.push_back(t.next_state);
    // Label: the letter right below `node` on this descent.
    batch.labels.push_back(cur->id.letter(node.depth()));
  }
  node.discriminator->train_step(batch, cfg_.lr);
  result.trained_discriminators.push_back(node.id);
  return true;
}

LearnStepResult Trainer::learning_step() {
  LearnStepResult result;
  SkillNode* node = &tree_.root();
  if (node->is_leaf()) {
    result.skipped = true;
    return result;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SelectOptions opt;
  opt.temp = cfg_.alpha_tree;
  opt.increment_counts = false;
  while (!node->children_are_leaves()) {
    if (unit(rng_) < cfg_.eta) train_ancestor_discriminator(*node, result);
    const int letter = sample_letter(letter_probs(qtable_, *node, opt));
    node = node->children[static_cast<std::size_t>(letter)].get();
  }

  for (const auto& child : node->children) {
    if (child->buffer->empty()) {
      warn_empty_buffer(node->id);
      result.skipped = true;
      return result;
    }
  }

  // Shared batch over the children's buffers, labeled by provenance.
  const int batch_size = cfg_.batch_size;
  std::vector<const Transition*> items(static_cast<std::size_t>(batch_size));
  TrainBatch disc_batch;
  disc_batch.inputs.reserve(static_cast<std::size_t>(batch_size));
  disc_batch.labels.reserve(static_cast<std::size_t>(batch_size));
  std::uniform_int_distribution<int> letter_dist(0, tree_.vocab_size() - 1);
  for (int i = 0; i < batch_size; ++i) {
    const int v = letter_dist(rng_);
    const Transition& t = node->children[static_cast<std::size_t>(v)]->buffer->sample_one(rng_);
    items[static_cast<std::size_t>(i)] = &t;
    disc_batch.inputs.push_back(t.next_state);
    disc_batch.labels.push_back(v);
  }
  result.disc_loss = node->discriminator->train_step(disc_batch, cfg_.lr);
  result.trained_discriminators.push_back(node->id);

  // Intrinsic rewards come from the live discriminators, including the
  // one just updated. The ancestor part is common to all children.
  const IntrinsicRewardSpec spec = reward_spec();
  std::vector<double> ancestor_sums(static_cast<std::size_t>(batch_size), 0.0);
  auto path = tree_.path_nodes(node->id);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const SkillNode* holder = path[i];
    const int letter = node->id.letter(static_cast<int>(i));
    for (int b = 0; b < batch_size; ++b) {
      const auto probs = holder->discriminator->infer(items[static_cast<std::size_t>(b)]->next_state);
      ancestor_sums[static_cast<std::size_t>(b)] +=
          std::max(std::log(probs[static_cast<std::size_t>(letter)]), spec.log_floor);
    }
  }
  std::vector<std::vector<double>> last_probs(static_cast<std::size_t>(batch_size));
  for (int b = 0; b < batch_size; ++b) {
    last_probs[static_cast<std::size_t>(b)] =
        node->discriminator->infer(items[static_cast<std::size_t>(b)]->next_state);
  }

  double dqn_loss_sum = 0.0;
  std::vector<double> rewards(static_cast<std::size_t>(batch_size));
  for (int v = 0; v < tree_.vocab_size(); ++v) {
    for (int b = 0; b < batch_size; ++b) {
      const double last_term =
          std::max(std::log(last_probs[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)]),
                   spec.log_floor);
      rewards[static_cast<std::size_t>(b)] =
          last_term + spec.alpha * ancestor_sums[static_cast<std::size_t>(b)];
    }
    SkillNode& child = *node->children[static_cast<std::size_t>(v)];
    dqn_loss_sum += dqn_update(*child.policy, items, rewards, cfg_.gamma, cfg_.lr, cfg_.tau,
                               cfg_.alpha_dqn);
    result.trained_policies.push_back(child.id);
  }
  result.dqn_loss = dqn_loss_sum / tree_.vocab_size();
  return result;
}

std::vector<SkillId> Trainer::maybe_split() {
  std::vector<SkillId> performed;
  // Candidates are fixed up front; splits grow the tree underneath them.
  std::vector<SkillNode*> parents;
  for (SkillNode* n : tree_.all_nodes()) {
    if (!n->is_leaf() && n->children_are_leaves()) parents.push_back(n);
  }
  const auto need = static_cast<std::uint64_t>(
      std::llround(cfg_.min_refill * static_cast<double>(cfg_.buffer_size)));
  for (SkillNode* parent : parents) {
    if (!parent->refill_pending) {
      const bool depth_ok = parent->depth() + 1 < cfg_.max_depth;
      if (depth_ok && parent->p_finish && ready_to_split(*parent->p_finish, cfg_.delta)) {
        parent->refill_pending = true;
        parent->refill_marks.clear();
        for (const auto& child : parent->children) {
          parent->refill_marks.push_back(child->buffer->total_pushes());
        }
      }
    }
    if (!parent->refill_pending) continue;
    bool refilled = true;
    for (std::size_t v = 0; v < parent->children.size(); ++v) {
      if (parent->children[v]->buffer->total_pushes() - parent->refill_marks[v] < need) {
        refilled = false;
        break;
      }
    }
    if (!refilled) continue;
    for (const auto& child : parent->children) {
      const double edge_value = qtable_.q(parent->id, child->id.last_letter());
      tree_.split_node(child->id);
      init_children_q(qtable_, child->id, edge_value, tree_.vocab_size());
      performed.push_back(child->id);
    }
    parent->phase = NodePhase::kExploitation;
    parent->refill_pending = false;
    parent->refill_marks.clear();
  }
  return performed;
}

void Trainer::train(std::int64_t total_steps, const MetricsSink& sink,
                    const std::function<bool(const Trainer&)>& stop) {
  const std::int64_t target = steps_ + total_steps;
  while (steps_ < target) {
    const EpisodeOutcome outcome = run_episode();
    const LearnStepResult learn = learning_step();
    maybe_split();
    if (sink) {
      MetricsRow row;
      row.step = steps_;
      row.episode = episodes_;
      row.skill = outcome.skill;
      row.r_tree = scale_return(outcome.discounted_return, cfg_.episode_len);
      row.disc_loss = learn.disc_loss;
      row.dqn_loss = learn.dqn_loss;
      row.n_leaves = static_cast<int>(tree_.leaves().size());
      sink(row);
    }
    if (stop && stop(*this)) break;
  }
}

std::map<SkillId, DensityGrid> Trainer::evaluate_skills(std::int64_t steps_per_skill) {
  std::map<SkillId, DensityGrid> grids;
  std::mt19937_64 eval_rng(rng_());
  std::uniform_int_distribution<int> letter_dist(0, tree_.vocab_size() - 1);
  for (const SkillId& id : tree_.all_ids()) {
    GridWorld env(env_spec_);
    DensityGrid grid(env_spec_.width, env_spec_.height);
    std::int64_t done_steps = 0;
    while (done_steps < steps_per_skill) {
      // Internal nodes descend uniformly to a leaf, once per episode.
      const SkillNode* leaf = &tree_.node(id);
      while (!leaf->is_leaf()) {
        leaf = leaf->children[static_cast<std::size_t>(letter_dist(eval_rng))].get();
      }
      Obs obs = env.reset();
      for (int t = 0; t < cfg_.episode_len && done_steps < steps_per_skill; ++t) {
        const int action = boltzmann_act(*leaf->policy, obs, cfg_.alpha_dqn, eval_rng);
        StepResult sr = env.step(action);
        const Cell cell = env.agent_cell();
        grid.at(cell.x, cell.y) += 1;
        obs = std::move(sr.next_obs);
        ++done_steps;
      }
    }
    grids.emplace(id, std::move(grid));
  }
  return grids;
}

TransferResult Trainer::run_transfer(std::int64_t total_steps, const MetricsSink& sink,
                                     const MetricsSink& baseline_sink) {
  TransferResult result;
  qtable_.reset_values();
  SelectOptions opt;
  opt.temp = cfg_.alpha_tree;
  opt.explore_bonus = cfg_.beta_explore;
  opt.warmup_updates = cfg_.transfer_warmup;
  const int n_leaves = static_cast<int>(tree_.leaves().size());

  GridWorld env(env_spec_);
  std::int64_t steps = 0;
  std::int64_t episode = 0;
  while (steps < total_steps) {
    const SkillId leaf_id = select_skill(tree_, qtable_, opt, rng_);
    const EpisodeOutcome outcome = roll_leaf(env, tree_.node(leaf_id), /*record=*/false);
    const double r_tree = scale_return(outcome.discounted_return, cfg_.episode_len);
    update_after_episode(qtable_, tree_, leaf_id, r_tree, cfg_.lr_tree);
    steps += cfg_.episode_len;
    episode += 1;
    MetricsRow row;
    row.step = steps;
    row.episode = episode;
    row.skill = leaf_id;
    row.r_tree = r_tree;
    row.n_leaves = n_leaves;
    row.disc_loss = std::numeric_limits<double>::quiet_NaN();
    row.dqn_loss = std::numeric_limits<double>::quiet_NaN();
    result.rows.push_back(row);
    if (sink) sink(row);
  }

  // Uniform tree-policy baseline over the same frozen skills.
  std::mt19937_64 baseline_rng(cfg_.seed ^ kBaselineSeedSalt);
  GridWorld baseline_env(env_spec_);
  std::uniform_int_distribution<int> letter_dist(0, tree_.vocab_size() - 1);
  std::swap(rng_, baseline_rng);
  steps = 0;
  episode = 0;
  while (steps < total_steps) {
    SkillNode* leaf = &tree_.root();
    while (!leaf->is_leaf()) {
      leaf = leaf->children[static_cast<std::size_t>(letter_dist(rng_))].get();
    }
    const EpisodeOutcome outcome = roll_leaf(baseline_env, *leaf, /*record=*/false);
    steps += cfg_.episode_len;
    episode += 1;
    MetricsRow row;
    row.step = steps;
    row.episode = episode;
    row.skill = leaf->id;
    row.r_tree = scale_return(outcome.discounted_return, cfg_.episode_len);
    row.n_leaves = n_leaves;
    row.disc_loss = std::numeric_limits<double>::quiet_NaN();
    row.dqn_loss = std::numeric_limits<double>::quiet_NaN();
    result.baseline_rows.push_back(row);
    if (baseline_sink) baseline_sink(row);
  }
  std::swap(rng_, baseline_rng);
  return result;
}

std::uint64_t parameter_hash(const SkillTree& tree) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](const std::vector<double>& params) {
    for (double p : params) {
      std::uint64_t bits;
      std::memcpy(&bits, &p, sizeof bits);
      for (int i = 0; i < 8; ++i) {
        hash ^= (bits >> (8 * i)) & 0xff;
        hash *= 0x100000001b3ULL;
      }
    }
  };
  for (const SkillNode* node : tree.all_nodes()) {
    if (node->discriminator) mix(node->discriminator->net().parameters());
    if (node->policy) {
      mix(node->policy->online().parameters());
      mix(node->policy->target().parameters());
    }
  }
  return hash;
}

}  // namespace elsim
