#include "elsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace elsim {

namespace {

using nlohmann::json;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (!part.empty()) out.push_back(std::stoi(part));
  }
  return out;
}

void apply_json(ElsimConfig& cfg, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "gamma") cfg.gamma = value.get<double>();
    else if (key == "buffer_size") cfg.buffer_size = value.get<int>();
    else if (key == "hidden") cfg.hidden = value.get<std::vector<int>>();
    else if (key == "lr") cfg.lr = value.get<double>();
    else if (key == "episode_len") cfg.episode_len = value.get<int>();
    else if (key == "batch_size") cfg.batch_size = value.get<int>();
    else if (key == "n_envs") cfg.n_envs = value.get<int>();
    else if (key == "tau") cfg.tau = value.get<double>();
    else if (key == "alpha_dqn") cfg.alpha_dqn = value.get<double>();
    else if (key == "delta") cfg.delta = value.get<double>();
    else if (key == "eta") cfg.eta = value.get<double>();
    else if (key == "beta_ema") cfg.beta_ema = value.get<double>();
    else if (key == "vocab_size") cfg.vocab_size = value.get<int>();
    else if (key == "alpha") cfg.alpha = value.get<double>();
    else if (key == "max_depth") cfg.max_depth = value.get<int>();
    else if (key == "min_refill") cfg.min_refill = value.get<double>();
    else if (key == "log_floor") cfg.log_floor = value.get<double>();
    else if (key == "gamma_tree") cfg.gamma_tree = value.get<double>();
    else if (key == "alpha_tree") cfg.alpha_tree = value.get<double>();
    else if (key == "lr_tree") cfg.lr_tree = value.get<double>();
    else if (key == "beta_explore") cfg.beta_explore = value.get<double>();
    else if (key == "transfer_warmup") cfg.transfer_warmup = value.get<int>();
    else if (key == "total_steps") cfg.total_steps = value.get<std::int64_t>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "optimizer") cfg.optimizer = value.get<std::string>();
    else if (key == "eval_steps_per_skill") cfg.eval_steps_per_skill = value.get<std::int64_t>();
    else if (key == "eval_interval") cfg.eval_interval = value.get<std::int64_t>();
    else throw std::domain_error("config: unknown key '" + key + "'");
  }
}

json config_as_json(const ElsimConfig& cfg) {
  json j;
  j["gamma"] = cfg.gamma;
  j["buffer_size"] = cfg.buffer_size;
  j["hidden"] = cfg.hidden;
  j["lr"] = cfg.lr;
  j["episode_len"] = cfg.episode_len;
  j["batch_size"] = cfg.batch_size;
  j["n_envs"] = cfg.n_envs;
  j["tau"] = cfg.tau;
  j["alpha_dqn"] = cfg.alpha_dqn;
  j["delta"] = cfg.delta;
  j["eta"] = cfg.eta;
  j["beta_ema"] = cfg.beta_ema;
  j["vocab_size"] = cfg.vocab_size;
  j["alpha"] = cfg.alpha;
  j["max_depth"] = cfg.max_depth;
  j["min_refill"] = cfg.min_refill;
  j["log_floor"] = cfg.log_floor;
  j["gamma_tree"] = cfg.gamma_tree;
  j["alpha_tree"] = cfg.alpha_tree;
  j["lr_tree"] = cfg.lr_tree;
  j["beta_explore"] = cfg.beta_explore;
  j["transfer_warmup"] = cfg.transfer_warmup;
  j["total_steps"] = cfg.total_steps;
  j["seed"] = cfg.seed;
  j["optimizer"] = cfg.optimizer;
  j["eval_steps_per_skill"] = cfg.eval_steps_per_skill;
  j["eval_interval"] = cfg.eval_interval;
  return j;
}

}  // namespace

Optimizer ElsimConfig::optimizer_kind() const {
  if (optimizer == "adam") return Optimizer::kAdam;
  if (optimizer == "sgd") return Optimizer::kSgd;
  throw std::domain_error("config: unknown optimizer '" + optimizer + "'");
}

void ElsimConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (gamma <= 0.0 || gamma > 1.0) throw std::domain_error("config: gamma outside (0,1]");
  if (gamma_tree <= 0.0 || gamma_tree > 1.0) throw std::domain_error("config: gamma_tree outside (0,1]");
  if (lr <= 0.0 || lr > 1.0) throw std::domain_error("config: lr outside (0,1]");
  if (lr_tree <= 0.0 || lr_tree > 1.0) throw std::domain_error("config: lr_tree outside (0,1]");
  if (tau < 0.0 || tau > 1.0) throw std::domain_error("config: tau outside [0,1]");
  if (!in_unit(delta)) throw std::domain_error("config: delta outside [0,1]");
  if (!in_unit(eta)) throw std::domain_error("config: eta outside [0,1]");
  if (!in_unit(beta_ema)) throw std::domain_error("config: beta_ema outside [0,1]");
  if (!in_unit(min_refill)) throw std::domain_error("config: min_refill outside [0,1]");
  if (vocab_size < 2) throw std::domain_error("config: vocab_size must be at least 2");
  if (max_depth < 1) throw std::domain_error("config: max_depth must be positive");
  if (buffer_size < 1) throw std::domain_error("config: buffer_size must be positive");
  if (batch_size < 1) throw std::domain_error("config: batch_size must be positive");
  if (episode_len < 1) throw std::domain_error("config: episode_len must be positive");
  if (n_envs < 1) throw std::domain_error("config: n_envs must be positive");
  if (alpha_dqn <= 0.0) throw std::domain_error("config: alpha_dqn must be positive");
  if (alpha_tree <= 0.0) throw std::domain_error("config: alpha_tree must be positive");
  if (log_floor >= 0.0) throw std::domain_error("config: log_floor must be negative");
  optimizer_kind();
}

ElsimConfig parse_config(std::istream& in) {
  // Sniff the first meaningful character: '{' selects JSON.
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = text.find_first_not_of(" \t\r\n");
  ElsimConfig cfg;
  if (pos != std::string::npos && text[pos] == '{') {
    apply_json(cfg, json::parse(text));
  } else {
    json j = json::object();
    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const std::size_t comment = line.find('#');
      if (comment != std::string::npos) line.erase(comment);
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          throw std::domain_error("config: malformed line '" + line + "'");
        }
        continue;
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw std::domain_error("config: empty key");
      if (key == "optimizer") {
        j[key] = value;
      } else if (key == "hidden") {
        j[key] = parse_int_list(value);
      } else {
        j[key] = json::parse(value);  // numbers
      }
    }
    apply_json(cfg, j);
  }
  cfg.validate();
  return cfg;
}

ElsimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("config: cannot open '" + path + "'");
  return parse_config(in);
}

std::string config_to_json(const ElsimConfig& cfg) { return config_as_json(cfg).dump(2); }

}  // namespace elsim
