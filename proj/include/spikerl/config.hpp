#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spikerl/baselines.hpp"
#include "spikerl/basis.hpp"
#include "spikerl/encoding.hpp"
#include "spikerl/gridworld.hpp"
#include "spikerl/trainer.hpp"

namespace spikerl {

enum class Scenario { Convergence, SpikeFrequency, WindowSweep, HorizonSweep, Acceptance };
enum class Method { FtsSnn, AnnPg, SarsaIf };

std::string_view scenario_name(Scenario s);
std::string_view method_name(Method m);
Scenario parse_scenario(std::string_view name);
Method parse_method(std::string_view name);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolicyConfig {
  int tau_s = 4;
  int k_s = 4;
  std::optional<BasisMode> basis;  // unset: identity when k_s == tau_s, else raised cosine

  BasisMode resolved_basis() const {
    return basis.value_or(k_s == tau_s ? BasisMode::Identity : BasisMode::RaisedCosine);
  }
};

struct SweepConfig {
  std::vector<int> horizons;     // T values for the spiking policy; empty = encoder.horizon
  std::vector<int> windows;      // W values; empty = encoder.window
  std::vector<int> if_horizons;  // presentation lengths for the IF baseline
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Convergence;
  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds = {1};
  int workers = 0;  // 0 = one per hardware thread
  GridSpec grid;
  EncoderConfig encoder;
  PolicyConfig policy;
  TrainConfig train;
  SarsaConfig sarsa;
  bool sarsa_episodes_set = false;  // otherwise SARSA gets the policy-gradient episode budget
  SweepConfig sweep;

  // Horizons / windows after defaulting to the encoder values.
  std::vector<int> horizons() const;
  std::vector<int> windows() const;

  // Throws ConfigError naming the offending key(s).
  void validate() const;
};

enum class Budget { Desk, Full };

// Desk: 5 epochs x 1000 episodes, 200 test episodes. Full: 25 x 1000, 500 tests.
void apply_budget(ExperimentConfig& cfg, Budget budget);

// Defaults for a scenario, before any file overrides.
ExperimentConfig default_config(Scenario scenario);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace spikerl
