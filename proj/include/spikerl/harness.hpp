#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "spikerl/config.hpp"

namespace spikerl {

// One CSV record. Per-episode rows hold a single episode; aggregate rows
// (episode == 0) hold means over the test episodes of a finished run, with
// reached_goal as the goal-reach rate.
struct MetricsRow {
  std::string scenario;  // scenario name plus sweep coordinates, e.g. "window-sweep:W=2:Nx=20:T=8"
  std::string method;
  std::uint64_t seed = 0;
  int epoch = 0;
  long episode = 0;
  double steps_to_goal = 0.0;
  double reached_goal = 0.0;
  double input_spikes = 0.0;
  double output_spikes = 0.0;
  double total_spikes = 0.0;
  double decision_latency_mean = 0.0;
  double eta = 0.0;

  // Throws std::logic_error when a count is negative or the spike total is inconsistent.
  void check() const;
};

inline constexpr std::string_view kCsvHeader =
    "scenario,method,seed,epoch,episode,steps_to_goal,reached_goal,input_spikes,output_spikes,total_spikes,"
    "decision_latency_mean,eta";

// Executes every (method x sweep value x seed) cell and returns the rows in
// canonical cell order, independent of the worker count.
std::vector<MetricsRow> run_scenario(const ExperimentConfig& cfg);

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_csv(std::istream& in);

struct SummaryRow {
  std::string scenario;
  std::string method;
  int count = 0;
  double steps_mean = 0.0;
  double steps_stderr = 0.0;
  double total_spikes_mean = 0.0;
  double total_spikes_stderr = 0.0;
};

// Mean and standard error (sample standard deviation / sqrt(n)) per
// (scenario label, method), in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Row builders shared by the harness and the CLI.
MetricsRow row_from_test(std::string scenario, std::string method, std::uint64_t seed, const TestSummary& t);
MetricsRow row_from_episode(std::string scenario, std::string method, std::uint64_t seed, const EpisodeMetric& m);

}  // namespace spikerl
