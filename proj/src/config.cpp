#include "spikerl/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace spikerl {

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Convergence: return "convergence";
    case Scenario::SpikeFrequency: return "spike-frequency";
    case Scenario::WindowSweep: return "window-sweep";
    case Scenario::HorizonSweep: return "horizon-sweep";
    case Scenario::Acceptance: return "acceptance";
  }
  return "?";
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::FtsSnn: return "fts-snn";
    case Method::AnnPg: return "ann-pg";
    case Method::SarsaIf: return "sarsa-if";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  for (Scenario s : {Scenario::Convergence, Scenario::SpikeFrequency, Scenario::WindowSweep, Scenario::HorizonSweep,
                     Scenario::Acceptance})
    if (scenario_name(s) == name) return s;
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::FtsSnn, Method::AnnPg, Method::SarsaIf})
    if (method_name(m) == name) return m;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::vector<int> ExperimentConfig::horizons() const {
  return sweep.horizons.empty() ? std::vector<int>{encoder.horizon} : sweep.horizons;
}

std::vector<int> ExperimentConfig::windows() const {
  return sweep.windows.empty() ? std::vector<int>{encoder.window} : sweep.windows;
}

void ExperimentConfig::validate() const {
  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(section) + ": " + e.what());
    }
  };
  if (methods.empty()) throw ConfigError("methods: at least one method is required");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (workers < 0) throw ConfigError("workers: must be non-negative");
  wrap("grid", [&] { grid.validate(); });
  wrap("encoder", [&] { encoder.validate(); });
  wrap("train", [&] { train.validate(); });
  wrap("sarsa", [&] { sarsa.validate(); });
  wrap("policy", [&] {
    PolicyShape{1, kNumActions, 1, policy.tau_s, policy.k_s, policy.resolved_basis()}.validate();
  });
  for (int t : horizons())
    if (t < 1) throw ConfigError("sweep.horizons: values must be positive");
  for (int w : windows())
    if (w < 1 || w > std::max(grid.rows, grid.cols)) throw ConfigError("sweep.windows: values must lie in [1, max(rows, cols)]");
  for (int t : sweep.if_horizons)
    if (t < 1) throw ConfigError("sweep.if_horizons: values must be positive");
  const bool wants_if = std::find(methods.begin(), methods.end(), Method::SarsaIf) != methods.end();
  if (wants_if && sweep.if_horizons.empty() &&
      (scenario == Scenario::WindowSweep || scenario == Scenario::HorizonSweep || scenario == Scenario::Acceptance))
    throw ConfigError("sweep.if_horizons: required for the sarsa-if method in this scenario");
}

void apply_budget(ExperimentConfig& cfg, Budget budget) {
  if (budget == Budget::Desk) {
    cfg.train.epochs = 5;
    cfg.train.episodes_per_epoch = 1000;
    cfg.train.test_episodes = 200;
  } else {
    cfg.train.epochs = 25;
    cfg.train.episodes_per_epoch = 1000;
    cfg.train.test_episodes = 500;
  }
  if (!cfg.sarsa_episodes_set) cfg.sarsa.episodes = cfg.train.epochs * cfg.train.episodes_per_epoch;
}

ExperimentConfig default_config(Scenario scenario) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  switch (scenario) {
    case Scenario::Convergence: cfg.methods = {Method::FtsSnn, Method::AnnPg}; break;
    case Scenario::SpikeFrequency: cfg.methods = {Method::FtsSnn}; break;
    case Scenario::WindowSweep:
      cfg.methods = {Method::FtsSnn, Method::SarsaIf};
      cfg.sweep.windows = {1, 2, 3, 4};
      cfg.sweep.if_horizons = {80};
      break;
    case Scenario::HorizonSweep:
      cfg.methods = {Method::FtsSnn, Method::SarsaIf};
      cfg.policy = {6, 1, std::nullopt};
      cfg.sweep.horizons = {2, 4, 8, 16};
      cfg.sweep.if_horizons = {8, 16, 32, 64, 128};
      break;
    case Scenario::Acceptance: cfg.methods = {Method::FtsSnn}; break;
  }
  cfg.sarsa.gamma = cfg.train.gamma;
  cfg.sarsa.max_episode_steps = cfg.train.max_episode_steps;
  cfg.sarsa.episodes = cfg.train.epochs * cfg.train.episodes_per_epoch;
  return cfg;
}

namespace {

// Walks a YAML mapping, consuming known keys and rejecting the rest.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) throw ConfigError(path_.empty() ? "config: top level must be a mapping"
                                                                 : path_ + ": expected a mapping");
  }

  std::string key_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  YAML::Node get(std::string_view key) {
    seen_.insert(std::string(key));
    if (!node_) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& n = node_;
    return n[std::string(key)];
  }

  template <class T>
  void read(std::string_view key, T& out) {
    const YAML::Node n = get(key);
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key) + ": invalid value");
    }
  }

  template <class T>
  bool read_list(std::string_view key, std::vector<T>& out) {
    const YAML::Node n = get(key);
    if (!n) return false;
    if (!n.IsSequence()) throw ConfigError(key_path(key) + ": expected a list");
    out.clear();
    try {
      for (const auto& item : n) out.push_back(item.as<T>());
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key) + ": invalid list entry");
    }
    return true;
  }

  void read_cell(std::string_view key, Cell& out) {
    std::vector<int> rc;
    if (!read_list(key, rc)) return;
    if (rc.size() != 2) throw ConfigError(key_path(key) + ": expected [row, col]");
    out = {rc[0], rc[1]};
  }

  Section child(std::string_view key) { return Section(get(key), key_path(key)); }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key_path(key) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  Section top(root, "");

  std::string scenario;
  top.read("scenario", scenario);
  if (scenario.empty()) throw ConfigError("scenario: required");
  ExperimentConfig cfg = default_config(parse_scenario(scenario));

  std::vector<std::string> methods;
  if (top.read_list("methods", methods)) {
    cfg.methods.clear();
    for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
  }
  top.read_list("seeds", cfg.seeds);
  top.read("workers", cfg.workers);

  {
    Section s = top.child("grid");
    s.read("rows", cfg.grid.rows);
    s.read("cols", cfg.grid.cols);
    s.read_list("wind", cfg.grid.wind);
    s.read_cell("start", cfg.grid.start);
    s.read_cell("goal", cfg.grid.goal);
    s.read("goal_reward", cfg.grid.goal_reward);
    s.reject_unknown();
  }
  {
    Section s = top.child("encoder");
    s.read("window", cfg.encoder.window);
    s.read("p_min", cfg.encoder.p_min);
    s.read("p_max", cfg.encoder.p_max);
    s.read("horizon", cfg.encoder.horizon);
    s.reject_unknown();
  }
  cfg.encoder.rows = cfg.grid.rows;
  cfg.encoder.cols = cfg.grid.cols;
  {
    Section s = top.child("policy");
    s.read("tau_s", cfg.policy.tau_s);
    s.read("k_s", cfg.policy.k_s);
    std::string basis;
    s.read("basis", basis);
    if (!basis.empty() && basis != "auto") {
      try {
        cfg.policy.basis = parse_basis_mode(basis);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("policy.basis: ") + e.what());
      }
    }
    s.reject_unknown();
  }
  bool sarsa_gamma_set = false;
  bool sarsa_steps_set = false;
  {
    Section s = top.child("train");
    s.read("gamma", cfg.train.gamma);
    s.read("eta0", cfg.train.eta0);
    s.read("schedule_k", cfg.train.schedule_k);
    s.read("epochs", cfg.train.epochs);
    s.read("episodes_per_epoch", cfg.train.episodes_per_epoch);
    s.read("test_episodes", cfg.train.test_episodes);
    s.read("max_episode_steps", cfg.train.max_episode_steps);
    s.read("max_represent", cfg.train.max_represent);
    s.reject_unknown();
  }
  {
    Section s = top.child("sarsa");
    s.read("alpha", cfg.sarsa.alpha);
    sarsa_gamma_set = static_cast<bool>(s.get("gamma"));
    s.read("gamma", cfg.sarsa.gamma);
    s.read("eps_start", cfg.sarsa.eps_start);
    s.read("eps_end", cfg.sarsa.eps_end);
    s.read("anneal_fraction", cfg.sarsa.anneal_fraction);
    s.read("q_init", cfg.sarsa.q_init);
    cfg.sarsa_episodes_set = static_cast<bool>(s.get("episodes"));
    s.read("episodes", cfg.sarsa.episodes);
    sarsa_steps_set = static_cast<bool>(s.get("max_episode_steps"));
    s.read("max_episode_steps", cfg.sarsa.max_episode_steps);
    s.reject_unknown();
  }
  if (!sarsa_gamma_set) cfg.sarsa.gamma = cfg.train.gamma;
  if (!sarsa_steps_set) cfg.sarsa.max_episode_steps = cfg.train.max_episode_steps;
  if (!cfg.sarsa_episodes_set) cfg.sarsa.episodes = cfg.train.epochs * cfg.train.episodes_per_epoch;
  {
    Section s = top.child("sweep");
    s.read_list("horizons", cfg.sweep.horizons);
    s.read_list("windows", cfg.sweep.windows);
    s.read_list("if_horizons", cfg.sweep.if_horizons);
    s.reject_unknown();
  }
  top.reject_unknown();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace spikerl
