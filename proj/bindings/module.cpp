#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "elsim/config.hpp"
#include "elsim/gridworld.hpp"
#include "elsim/intrinsic.hpp"
#include "elsim/metrics.hpp"
#include "elsim/mlp.hpp"
#include "elsim/snapshot.hpp"
#include "elsim/trainer.hpp"

namespace py = pybind11;
using namespace elsim;

namespace {

ElsimConfig config_from_dict(const py::dict& overrides) {
  py::dict d;
  py::module_ json = py::module_::import("json");
  const std::string text = py::cast<std::string>(json.attr("dumps")(overrides));
  std::istringstream in(text);
  return parse_config(in);
}

py::dict row_to_dict(const MetricsRow& row) {
  py::dict d;
  d["step"] = row.step;
  d["episode"] = row.episode;
  d["skill"] = row.skill.str();
  d["r_tree"] = row.r_tree;
  d["disc_loss"] = row.disc_loss;
  d["dqn_loss"] = row.dqn_loss;
  d["n_leaves"] = row.n_leaves;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Skill-tree reinforcement learning on gridworlds";

  m.def("softmax", [](const std::vector<double>& logits) { return softmax(logits); },
        py::arg("logits"));
  m.def("soft_max_value",
        [](const std::vector<double>& x, double temp) { return soft_max_value(x, temp); },
        py::arg("values"), py::arg("temp"));
  m.def("mbie_eb", &mbie_eb, py::arg("q"), py::arg("n"), py::arg("beta_explore"));
  m.def("scale_return", &scale_return, py::arg("discounted_return"), py::arg("episode_len"));

  py::class_<Mlp>(m, "Mlp")
      .def(py::init([](const std::vector<int>& sizes, std::uint64_t seed, const std::string& opt) {
             Mlp net(sizes, opt == "sgd" ? Optimizer::kSgd : Optimizer::kAdam);
             std::mt19937_64 rng(seed);
             net.init_random(rng);
             return net;
           }),
           py::arg("layer_sizes"), py::arg("seed") = 0, py::arg("optimizer") = "adam")
      .def("forward", [](const Mlp& net, const std::vector<double>& x) { return net.forward(x); })
      .def("train_classifier_step",
           [](Mlp& net, const std::vector<std::vector<double>>& inputs,
              const std::vector<int>& labels, double lr) {
             TrainBatch batch;
             batch.inputs = inputs;
             batch.labels = labels;
             return net.train_classifier_step(batch, lr);
           },
           py::arg("inputs"), py::arg("labels"), py::arg("lr"))
      .def_property_readonly("layer_sizes", &Mlp::layer_sizes)
      .def("parameters", &Mlp::parameters);

  py::class_<GridSpec>(m, "GridSpec")
      .def_readonly("width", &GridSpec::width)
      .def_readonly("height", &GridSpec::height)
      .def_readonly("episode_len", &GridSpec::episode_len);

  py::class_<GridWorld>(m, "GridWorld")
      .def(py::init([](const std::string& name) { return GridWorld(grid_spec_from_name(name)); }),
           py::arg("name"))
      .def("reset", &GridWorld::reset)
      .def("step",
           [](GridWorld& env, int action) {
             const StepResult r = env.step(action);
             return py::make_tuple(r.next_obs, r.extrinsic_reward, r.done);
           },
           py::arg("action"))
      .def("layout", [](const GridWorld& env) { return ascii_layout(env.spec()); })
      .def_property_readonly("spec", &GridWorld::spec)
      .def_property_readonly("agent_cell", [](const GridWorld& env) {
        const Cell c = env.agent_cell();
        return py::make_tuple(c.x, c.y);
      });

  py::class_<DensityGrid>(m, "DensityGrid")
      .def_readonly("width", &DensityGrid::width)
      .def_readonly("height", &DensityGrid::height)
      .def_readonly("counts", &DensityGrid::counts)
      .def("total", &DensityGrid::total)
      .def("to_csv", &DensityGrid::to_csv);
  m.def("histogram_intersection", &histogram_intersection, py::arg("a"), py::arg("b"));

  py::class_<Trainer>(m, "Trainer")
      .def(py::init([](const std::string& env_name, const py::dict& config) {
             return Trainer(grid_spec_from_name(env_name), config_from_dict(config));
           }),
           py::arg("env"), py::arg("config") = py::dict())
      .def_static(
          "from_snapshot",
          [](const std::string& path, const std::string& env_name, const py::dict& config) {
            Snapshot snap = load_snapshot(path);
            return Trainer(std::move(snap.tree), std::move(snap.qtable),
                           grid_spec_from_name(env_name), config_from_dict(config));
          },
          py::arg("path"), py::arg("env"), py::arg("config") = py::dict())
      .def("train",
           [](Trainer& trainer, std::int64_t total_steps) {
             std::vector<py::dict> rows;
             trainer.train(total_steps,
                           [&rows](const MetricsRow& row) { rows.push_back(row_to_dict(row)); });
             return rows;
           },
           py::arg("total_steps"))
      .def("run_episode",
           [](Trainer& trainer) {
             const EpisodeOutcome outcome = trainer.run_episode();
             py::dict d;
             d["skill"] = outcome.skill.str();
             d["discounted_return"] = outcome.discounted_return;
             d["final_state"] = outcome.final_state;
             return d;
           })
      .def("learning_step",
           [](Trainer& trainer) {
             const LearnStepResult r = trainer.learning_step();
             py::dict d;
             d["disc_loss"] = r.disc_loss;
             d["dqn_loss"] = r.dqn_loss;
             d["skipped"] = r.skipped;
             return d;
           })
      .def("maybe_split",
           [](Trainer& trainer) {
             std::vector<std::string> out;
             for (const SkillId& id : trainer.maybe_split()) out.push_back(id.str());
             return out;
           })
      .def("evaluate_skills",
           [](Trainer& trainer, std::int64_t steps_per_skill) {
             py::dict out;
             for (auto& [id, grid] : trainer.evaluate_skills(steps_per_skill)) {
               out[py::str(id.is_root() ? "root" : id.str())] = grid;
             }
             return out;
           },
           py::arg("steps_per_skill") = 500)
      .def("run_transfer",
           [](Trainer& trainer, std::int64_t total_steps) {
             const TransferResult result = trainer.run_transfer(total_steps);
             std::vector<py::dict> rows, baseline;
             for (const auto& r : result.rows) rows.push_back(row_to_dict(r));
             for (const auto& r : result.baseline_rows) baseline.push_back(row_to_dict(r));
             return py::make_tuple(rows, baseline);
           },
           py::arg("total_steps"))
      .def("save_snapshot",
           [](const Trainer& trainer, const std::string& path) {
             save_snapshot(trainer.tree(), trainer.qtable(), path);
           },
           py::arg("path"))
      .def("leaves",
           [](const Trainer& trainer) {
             std::vector<std::string> out;
             for (const SkillId& id : trainer.tree().leaves()) out.push_back(id.str());
             return out;
           })
      .def("parameter_hash", [](const Trainer& trainer) { return parameter_hash(trainer.tree()); })
      .def_property_readonly("total_env_steps", &Trainer::total_env_steps)
      .def_property_readonly("episodes", &Trainer::episodes);
}
