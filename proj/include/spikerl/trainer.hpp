#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spikerl/encoding.hpp"
#include "spikerl/glm_policy.hpp"
#include "spikerl/gridworld.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct TrainConfig {
  double gamma = 0.95;
  double eta0 = 0.01;
  double schedule_k = 0.04;
  int epochs = 5;
  int episodes_per_epoch = 1000;
  int test_episodes = 200;
  int max_episode_steps = 500;
  int max_represent = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

// One agent decision, including the silent presentations that preceded it.
struct Decision {
  Action action = Action::Up;
  int spike_time = 0;       // tau of the deciding spike; 0 for a fallback or non-spiking decision
  int presentations = 1;    // SNN presentations used (> 1 after silent trials)
  int latency = 0;          // SNN time steps elapsed until the decision
  long input_spikes = 0;    // input bits consumed over all presentations
  long output_spikes = 0;
  std::optional<GradientAccumulator> gradient;  // absent for fallback actions
};

struct StepRecord {
  Cell state;
  Decision decision;
  double reward = 0.0;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  bool reached_goal = false;

  int total_steps() const { return static_cast<int>(steps.size()); }
  std::vector<double> rewards() const;
};

struct EpisodeStats {
  int steps = 0;
  bool reached_goal = false;
  long input_spikes = 0;
  long output_spikes = 0;
  double decision_latency_mean = 0.0;

  long total_spikes() const { return input_spikes + output_spikes; }
};

EpisodeStats episode_stats(const EpisodeTrace& trace);

// Runs from reset until the goal or the step limit; decide(state) picks each action.
template <class Decide>
EpisodeTrace rollout(const GridSpec& env, int max_steps, Decide&& decide) {
  EpisodeTrace trace;
  Cell s = reset(env);
  for (int t = 0; t < max_steps; ++t) {
    Decision d = decide(s);
    const StepOutcome out = step(env, s, d.action);
    trace.steps.push_back({s, std::move(d), out.reward});
    s = out.next;
    if (out.done) {
      trace.reached_goal = true;
      break;
    }
  }
  return trace;
}

// First-to-spike decision for one state. Silent presentations are retried
// with fresh input spikes up to max_represent times; after that a uniformly
// random action is taken without a gradient.
Decision decide_first_to_spike(const GlmPolicy& policy, const EncoderConfig& enc, Cell state,
                               int max_represent, bool with_gradient, Rng& rng);

EpisodeTrace run_episode(const GlmPolicy& policy, const GridSpec& env, const EncoderConfig& enc,
                         const TrainConfig& cfg, Rng& rng, bool with_gradients = true);

// V_t = R_{t+1} + gamma * V_{t+1}, zero past the last step.
std::vector<double> returns(std::span<const double> rewards, double gamma);

// theta += eta * V_t * grad_t for every step carrying a gradient, last step first.
void apply_update(std::span<double> weights, std::span<double> biases, const EpisodeTrace& trace,
                  std::span<const double> v, double eta);

template <class Model>
void apply_update(Model& model, const EpisodeTrace& trace, std::span<const double> v, double eta) {
  apply_update(model.weights(), model.biases(), trace, v, eta);
}

// eta_i = eta0 / (1 + k (i - 1)), i >= 1.
double learning_rate(const TrainConfig& cfg, long i);

struct EpisodeMetric {
  int epoch = 0;    // 1-based
  long episode = 0; // 1-based, counted across epochs
  double eta = 0.0;
  EpisodeStats stats;
};

struct TestSummary {
  int epoch = 0;  // 0 = before training
  int episodes = 0;
  double mean_steps = 0.0;
  double goal_rate = 0.0;
  double mean_input_spikes = 0.0;
  double mean_output_spikes = 0.0;
  double mean_decision_latency = 0.0;

  double mean_total_spikes() const { return mean_input_spikes + mean_output_spikes; }
};

TestSummary summarize_tests(int epoch, std::span<const EpisodeStats> episodes);

struct MetricsSeries {
  std::vector<EpisodeMetric> training;
  std::vector<TestSummary> tests;  // tests[0] is the untrained policy, then one per epoch
};

// Seed streams used by the training loops.
enum class Stream : std::uint64_t { Init = 0, Train = 1, Test = 2 };
inline Rng make_stream(std::uint64_t seed, Stream s) { return Rng(derive_seed(seed, static_cast<std::uint64_t>(s))); }

// Generic Monte-Carlo policy-gradient loop shared by every on-policy learner.
// episode(model, rng, learn) must return a trace; gradients are only used when learn is true.
template <class Model, class Episode>
MetricsSeries run_policy_gradient(Model& model, const TrainConfig& cfg, Episode&& episode) {
  cfg.validate();
  MetricsSeries metrics;
  Rng train_rng = make_stream(cfg.seed, Stream::Train);
  Rng test_rng = make_stream(cfg.seed, Stream::Test);

  auto test = [&](int epoch) {
    std::vector<EpisodeStats> stats;
    stats.reserve(static_cast<std::size_t>(cfg.test_episodes));
    for (int e = 0; e < cfg.test_episodes; ++e) stats.push_back(episode_stats(episode(model, test_rng, false)));
    metrics.tests.push_back(summarize_tests(epoch, stats));
  };

  test(0);
  long i = 1;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (int e = 0; e < cfg.episodes_per_epoch; ++e, ++i) {
      const double eta = learning_rate(cfg, i);
      const EpisodeTrace trace = episode(model, train_rng, true);
      const auto v = returns(trace.rewards(), cfg.gamma);
      apply_update(model, trace, v, eta);
      metrics.training.push_back({epoch, i, eta, episode_stats(trace)});
    }
    test(epoch);
  }
  return metrics;
}

struct GlmTrainResult {
  GlmPolicy policy;
  MetricsSeries metrics;
};

// Trains a freshly initialized first-to-spike policy with n_in = enc.n_inputs(),
// four outputs and horizon enc.horizon.
GlmTrainResult train(const GridSpec& env, const EncoderConfig& enc, const TrainConfig& cfg, int tau_s, int k_s,
                     BasisMode basis);

// Continues training an existing policy.
MetricsSeries train(GlmPolicy& policy, const GridSpec& env, const EncoderConfig& enc, const TrainConfig& cfg);

// Test-only evaluation of a fixed policy.
TestSummary evaluate_policy(const GlmPolicy& policy, const GridSpec& env, const EncoderConfig& enc,
                            const TrainConfig& cfg, int episodes, Rng& rng);

}  // namespace spikerl
