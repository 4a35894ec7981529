#include <doctest.h>

#include <sstream>

#include "elsim/snapshot.hpp"
#include "elsim/trainer.hpp"

using namespace elsim;

namespace {

ElsimConfig small_config() {
  ElsimConfig cfg;
  cfg.n_envs = 1;
  cfg.buffer_size = 200;
  cfg.hidden = {8};
  cfg.batch_size = 8;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("snapshots round-trip byte for byte") {
  ElsimConfig cfg = small_config();
  Trainer trainer(make_empty(), cfg);
  trainer.train(1200);
  // Force one split so the snapshot covers internal nodes, phases,
  // refill marks and inherited edges.
  trainer.tree().root().p_finish->set_estimates({0.99, 0.99, 0.99, 0.99});
  for (int i = 0; i < 30 && trainer.maybe_split().empty(); ++i) trainer.run_episode();
  REQUIRE(trainer.tree().leaves().size() == 16);

  const std::string first = snapshot_to_json(trainer.tree(), trainer.qtable());
  Snapshot restored = snapshot_from_json(first);
  const std::string second = snapshot_to_json(restored.tree, restored.qtable);
  CHECK(first == second);
  CHECK(parameter_hash(restored.tree) == parameter_hash(trainer.tree()));
  CHECK(restored.tree.leaves() == trainer.tree().leaves());
  CHECK(restored.tree.root().phase == NodePhase::kExploitation);
  // Q-table contents survive exactly.
  REQUIRE(restored.qtable.table().size() == trainer.qtable().table().size());
  for (const auto& [id, edges] : trainer.qtable().table()) {
    CHECK(restored.qtable.edges(id).q == edges.q);
    CHECK(restored.qtable.edges(id).n == edges.n);
    CHECK(restored.qtable.edges(id).updates == edges.updates);
  }
}

TEST_CASE("a freshly initialized tree round-trips") {
  ElsimConfig cfg = small_config();
  Trainer trainer(make_empty(), cfg);
  const std::string first = snapshot_to_json(trainer.tree(), trainer.qtable());
  Snapshot restored = snapshot_from_json(first);
  CHECK(snapshot_to_json(restored.tree, restored.qtable) == first);
  CHECK(restored.tree.leaves().size() == 4);
}

TEST_CASE("a restored trainer keeps behaving like the saved one") {
  ElsimConfig cfg = small_config();
  Trainer trainer(make_vertical_wall(true), cfg);
  trainer.train(800);
  const std::string snapshot = snapshot_to_json(trainer.tree(), trainer.qtable());

  Snapshot restored = snapshot_from_json(snapshot);
  ElsimConfig cfg2 = cfg;
  cfg2.seed = 17;
  Trainer resumed(std::move(restored.tree), std::move(restored.qtable), make_vertical_wall(true),
                  cfg2);
  const auto grids = resumed.evaluate_skills(300);
  CHECK(grids.size() == resumed.tree().node_count());
  const TransferResult transfer = resumed.run_transfer(500);
  CHECK(transfer.rows.size() == 5);
}

TEST_CASE("malformed snapshots are rejected") {
  CHECK_THROWS(snapshot_from_json("{}"));
  CHECK_THROWS(snapshot_from_json(R"({"format":"something-else"})"));
}
