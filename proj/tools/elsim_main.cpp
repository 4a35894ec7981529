#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "elsim/config.hpp"
#include "elsim/gridworld.hpp"
#include "elsim/metrics.hpp"
#include "elsim/snapshot.hpp"
#include "elsim/trainer.hpp"

namespace {

namespace fs = std::filesystem;
using namespace elsim;

std::string density_file_name(const SkillId& id) {
  return "density_" + (id.is_root() ? std::string("root") : id.str()) + ".csv";
}

void write_density_files(const std::map<SkillId, DensityGrid>& grids, const fs::path& dir) {
  for (const auto& [id, grid] : grids) {
    std::ofstream out(dir / density_file_name(id));
    out << grid.to_csv();
  }
}

void write_layout(const GridSpec& spec, const fs::path& dir) {
  std::ofstream out(dir / "layout.txt");
  out << ascii_layout(spec);
}

struct CommonArgs {
  std::string config_path;
  std::string env_name = "empty";
  std::string out_dir = "out";
  std::string snapshot_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

ElsimConfig resolve_config(const CommonArgs& args) {
  ElsimConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  return cfg;
}

int cmd_train(const CommonArgs& args) {
  const ElsimConfig cfg = resolve_config(args);
  const GridSpec spec = grid_spec_from_name(args.env_name);
  fs::create_directories(args.out_dir);
  write_layout(spec, args.out_dir);

  Trainer trainer(spec, cfg);
  MetricsCsvWriter metrics((fs::path(args.out_dir) / "metrics.csv").string());
  const std::int64_t eval_every = cfg.eval_interval;
  std::int64_t next_eval = eval_every > 0 ? eval_every : -1;
  trainer.train(cfg.total_steps, [&](const MetricsRow& row) {
    metrics.write(row);
    if (next_eval > 0 && row.episode >= next_eval) {
      const fs::path dir = fs::path(args.out_dir) / ("eval_" + std::to_string(row.episode));
      fs::create_directories(dir);
      write_density_files(trainer.evaluate_skills(cfg.eval_steps_per_skill), dir);
      next_eval += eval_every;
    }
  });
  metrics.flush();
  write_density_files(trainer.evaluate_skills(cfg.eval_steps_per_skill), args.out_dir);
  save_snapshot(trainer.tree(), trainer.qtable(), (fs::path(args.out_dir) / "tree.json").string());
  std::cout << "trained " << trainer.total_env_steps() << " steps, "
            << trainer.tree().leaves().size() << " skills\n";
  return 0;
}

int cmd_eval(const CommonArgs& args) {
  if (args.snapshot_path.empty()) throw std::domain_error("eval: --snapshot is required");
  const ElsimConfig cfg = resolve_config(args);
  const GridSpec spec = grid_spec_from_name(args.env_name);
  fs::create_directories(args.out_dir);
  write_layout(spec, args.out_dir);

  Snapshot snap = load_snapshot(args.snapshot_path);
  Trainer trainer(std::move(snap.tree), std::move(snap.qtable), spec, cfg);
  write_density_files(trainer.evaluate_skills(cfg.eval_steps_per_skill), args.out_dir);
  std::cout << "evaluated " << trainer.tree().node_count() << " skills\n";
  return 0;
}

int cmd_transfer(const CommonArgs& args) {
  if (args.snapshot_path.empty()) throw std::domain_error("transfer: --snapshot is required");
  const ElsimConfig cfg = resolve_config(args);
  const GridSpec spec = grid_spec_from_name(args.env_name);
  fs::create_directories(args.out_dir);
  write_layout(spec, args.out_dir);

  Snapshot snap = load_snapshot(args.snapshot_path);
  Trainer trainer(std::move(snap.tree), std::move(snap.qtable), spec, cfg);
  MetricsCsvWriter metrics((fs::path(args.out_dir) / "metrics.csv").string());
  MetricsCsvWriter baseline((fs::path(args.out_dir) / "baseline_metrics.csv").string());
  trainer.run_transfer(cfg.total_steps,
                       [&](const MetricsRow& row) { metrics.write(row); },
                       [&](const MetricsRow& row) { baseline.write(row); });
  metrics.flush();
  baseline.flush();
  save_snapshot(trainer.tree(), trainer.qtable(), (fs::path(args.out_dir) / "tree.json").string());
  std::cout << "transfer finished after " << cfg.total_steps << " steps\n";
  return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_snapshot) {
  cmd->add_option("--config", args.config_path, "Config file (key=value lines or JSON)");
  cmd->add_option("--env", args.env_name, "Environment: empty, four-rooms, wall, wall-reward");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seed", args.seed, "Random seed (overrides the config)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  auto* snap = cmd->add_option("--snapshot", args.snapshot_path, "Tree snapshot (tree.json)");
  if (needs_snapshot) snap->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill-tree reinforcement learning on gridworlds"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, transfer_args;
  CLI::App* train = app.add_subcommand("train", "Train a skill tree from scratch");
  add_common(train, train_args, false);
  CLI::App* eval = app.add_subcommand("eval", "Evaluate the skills of a snapshot");
  add_common(eval, eval_args, true);
  CLI::App* transfer = app.add_subcommand("transfer", "Rerun the tree policy on a new task");
  add_common(transfer, transfer_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (transfer->parsed()) return cmd_transfer(transfer_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
