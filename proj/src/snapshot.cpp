#include "elsim/snapshot.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace elsim {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "elsim-tree-v1";

json mlp_to_json(const Mlp& net) {
  json j;
  j["params"] = net.parameters();
  if (net.optimizer_kind() == Optimizer::kAdam) {
    const AdamState& st = net.adam_state();
    j["adam"] = {{"m", st.m}, {"v", st.v}, {"t", st.t}};
  }
  return j;
}

void mlp_from_json(Mlp& net, const json& j) {
  net.set_parameters(j.at("params").get<std::vector<double>>());
  if (j.count("adam")) {
    AdamState st;
    st.m = j["adam"].at("m").get<std::vector<double>>();
    st.v = j["adam"].at("v").get<std::vector<double>>();
    st.t = j["adam"].at("t").get<std::int64_t>();
    net.set_adam_state(std::move(st));
  }
}

const char* phase_name(NodePhase phase) {
  return phase == NodePhase::kLearning ? "learning" : "exploitation";
}

NodePhase phase_from_name(const std::string& name) {
  if (name == "learning") return NodePhase::kLearning;
  if (name == "exploitation") return NodePhase::kExploitation;
  throw std::domain_error("snapshot: unknown phase '" + name + "'");
}

const char* optimizer_name(Optimizer opt) { return opt == Optimizer::kAdam ? "adam" : "sgd"; }

Optimizer optimizer_from_name(const std::string& name) {
  if (name == "adam") return Optimizer::kAdam;
  if (name == "sgd") return Optimizer::kSgd;
  throw std::domain_error("snapshot: unknown optimizer '" + name + "'");
}

}  // namespace

std::string snapshot_to_json(const SkillTree& tree, const TreeQTable& qtable) {
  json doc;
  doc["format"] = kFormatTag;
  doc["vocab_size"] = tree.vocab_size();
  doc["max_depth"] = tree.max_depth();
  const TreeBuildParams& bp = tree.build_params();
  doc["build"] = {{"obs_dim", bp.obs_dim},
                  {"hidden", bp.hidden},
                  {"action_count", bp.action_count},
                  {"buffer_capacity", bp.buffer_capacity},
                  {"tracker_beta", bp.tracker_beta},
                  {"optimizer", optimizer_name(bp.optimizer)}};
  json nodes = json::array();
  for (const SkillNode* node : tree.all_nodes()) {
    json n;
    n["id"] = node->id.str();
    n["phase"] = phase_name(node->phase);
    n["refill_pending"] = node->refill_pending;
    if (!node->refill_marks.empty()) n["refill_marks"] = node->refill_marks;
    if (node->p_finish) n["p_finish"] = node->p_finish->estimates();
    if (node->discriminator) n["discriminator"] = mlp_to_json(node->discriminator->net());
    if (node->policy) {
      n["policy"] = {{"online", mlp_to_json(node->policy->online())},
                     {"target", mlp_to_json(node->policy->target())}};
    }
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  json table = json::array();
  for (const auto& [id, edges] : qtable.table()) {
    table.push_back(
        {{"id", id.str()}, {"q", edges.q}, {"n", edges.n}, {"updates", edges.updates}});
  }
  doc["qtable"] = std::move(table);
  return doc.dump(1);
}

void save_snapshot(const SkillTree& tree, const TreeQTable& qtable, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::domain_error("snapshot: cannot open '" + path + "'");
  out << snapshot_to_json(tree, qtable) << '\n';
}

Snapshot snapshot_from_json(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.at("format").get<std::string>() != kFormatTag) {
    throw std::domain_error("snapshot: unsupported format");
  }
  const int vocab = doc.at("vocab_size").get<int>();
  const int max_depth = doc.at("max_depth").get<int>();
  const json& build = doc.at("build");
  TreeBuildParams params;
  params.obs_dim = build.at("obs_dim").get<int>();
  params.hidden = build.at("hidden").get<std::vector<int>>();
  params.action_count = build.at("action_count").get<int>();
  params.buffer_capacity = build.at("buffer_capacity").get<std::size_t>();
  params.tracker_beta = build.at("tracker_beta").get<double>();
  params.optimizer = optimizer_from_name(build.at("optimizer").get<std::string>());

  SkillTree tree(vocab, max_depth, params, /*seed=*/0, /*create_first_level=*/false);

  // First pass rebuilds the structure: nodes are stored in preorder, so a
  // parent always precedes its children and can be split when a child id
  // shows up in the document.
  std::set<std::string> ids;
  for (const json& n : doc.at("nodes")) ids.insert(n.at("id").get<std::string>());
  for (const json& n : doc.at("nodes")) {
    const SkillId id = SkillId::parse(n.at("id").get<std::string>());
    if (ids.count(id.child(0).str())) tree.split_node(id);
  }
  // Second pass restores node state.
  for (const json& n : doc.at("nodes")) {
    SkillNode& node = tree.node(SkillId::parse(n.at("id").get<std::string>()));
    node.phase = phase_from_name(n.at("phase").get<std::string>());
    node.refill_pending = n.at("refill_pending").get<bool>();
    if (n.count("refill_marks")) {
      node.refill_marks = n["refill_marks"].get<std::vector<std::uint64_t>>();
    }
    if (n.count("p_finish")) node.p_finish->set_estimates(n["p_finish"].get<std::vector<double>>());
    if (n.count("discriminator")) mlp_from_json(node.discriminator->net(), n["discriminator"]);
    if (n.count("policy")) {
      mlp_from_json(node.policy->online(), n["policy"].at("online"));
      mlp_from_json(node.policy->target(), n["policy"].at("target"));
    }
  }

  TreeQTable qtable;
  for (const json& entry : doc.at("qtable")) {
    const SkillId id = SkillId::parse(entry.at("id").get<std::string>());
    qtable.init_node(id, vocab);
    EdgeValues& e = qtable.edges_mut(id);
    e.q = entry.at("q").get<std::vector<double>>();
    e.n = entry.at("n").get<std::vector<std::int64_t>>();
    e.updates = entry.at("updates").get<std::int64_t>();
    if (e.q.size() != static_cast<std::size_t>(vocab) || e.n.size() != e.q.size()) {
      throw std::domain_error("snapshot: malformed q-table entry");
    }
  }
  return Snapshot{std::move(tree), std::move(qtable)};
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("snapshot: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return snapshot_from_json(buf.str());
}

}  // namespace elsim
