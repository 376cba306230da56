#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "spikerl/config.hpp"

namespace spikerl::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Options {
  // Training profile for the learning criteria (4-8). Seeds are taken from profile.seeds.
  ExperimentConfig profile;
  // Presentation lengths tried when matching the IF network to the first-to-spike policy.
  std::vector<int> if_horizons = {8, 16, 24, 32, 48, 64, 96, 128};
  int workers = 0;
};

// W = 1, T = 8, K_s = tau_s = 4 on the default grid, 5 seeds x 5000 episodes.
ExperimentConfig default_profile();
Options default_options();

// Runs criteria 1-10 in order, reporting each result as soon as it is known.
std::vector<CriterionResult> run_all(const Options& options,
                                     const std::function<void(const CriterionResult&)>& report = {});

std::string format_line(const CriterionResult& r);

}  // namespace spikerl::acceptance
