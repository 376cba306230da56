#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/encoding.hpp"
#include "spikerl/gradient.hpp"
#include "spikerl/gridworld.hpp"
#include "spikerl/rng.hpp"
#include "spikerl/trainer.hpp"

namespace spikerl {

enum class OutputMode { Softmax, Relu };

class InvalidModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-layer dense network over rate inputs: one weight per synapse and one
// bias per output. Softmax outputs give a policy; ReLU outputs give action values.
// Weights are output-major: [j][i].
class DensePolicyNet {
 public:
  DensePolicyNet(int n_in, int n_out, OutputMode mode);

  int n_in() const { return n_in_; }
  int n_out() const { return n_out_; }
  OutputMode mode() const { return mode_; }

  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> biases() { return biases_; }
  std::span<const double> biases() const { return biases_; }
  std::span<const double> weights_of(int j) const {
    return {weights_.data() + static_cast<std::size_t>(j * n_in_), static_cast<std::size_t>(n_in_)};
  }
  double& weight(int i, int j) { return weights_[static_cast<std::size_t>(j * n_in_ + i)]; }
  double weight(int i, int j) const { return weights_[static_cast<std::size_t>(j * n_in_ + i)]; }

  // w_j . rates + b_j for every output.
  std::vector<double> pre_activations(std::span<const double> rates) const;
  // Softmax probabilities or ReLU values, depending on mode.
  std::vector<double> outputs(std::span<const double> rates) const;

  friend bool operator==(const DensePolicyNet&, const DensePolicyNet&) = default;

 private:
  int n_in_;
  int n_out_;
  OutputMode mode_;
  std::vector<double> weights_;
  std::vector<double> biases_;
};

std::vector<double> softmax(std::span<const double> logits);

// Samples an action from softmax(W^T rates + b). Throws InvalidModeError for value nets.
Action ann_pg_act(const DensePolicyNet& net, std::span<const double> rates, Rng& rng);

// Gradient of log softmax at the chosen action.
GradientAccumulator ann_pg_gradient(const DensePolicyNet& net, std::span<const double> rates, Action a);

struct AnnTrainResult {
  DensePolicyNet net;
  MetricsSeries metrics;
};

// Same Monte-Carlo policy-gradient loop as the spiking policy, with the
// softmax net fed the encoder's rate vector. No spikes are recorded.
AnnTrainResult train_ann_pg(const GridSpec& env, const EncoderConfig& enc, const TrainConfig& cfg);

struct SarsaConfig {
  double alpha = 0.05;
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_end = 0.1;
  double anneal_fraction = 0.6;  // share of episodes over which epsilon decays linearly
  double q_init = 1.0;           // initial output bias; optimistic relative to the goal reward
  int episodes = 5000;
  int max_episode_steps = 500;
  std::uint64_t seed = 1;

  void validate() const;
  double epsilon(int episode) const;  // episode is 0-based
};

struct SarsaResult {
  DensePolicyNet net;
  std::vector<EpisodeStats> episodes;
};

// Uniform random action with probability eps, otherwise greedy.
int epsilon_greedy(std::span<const double> q, double eps, Rng& rng);

// One semi-gradient step on Q(s, a) towards target, given the current
// pre-activation of a. Inactive units (pre < 0) have zero gradient.
void sarsa_update(DensePolicyNet& net, std::span<const double> rates, int a, double pre, double target,
                  double alpha);

// Semi-gradient SARSA on Q(s, a) = ReLU(w_a . rates(s) + b_a) with
// epsilon-greedy behaviour. Weights start small and positive so every unit
// begins in its active region.
SarsaResult sarsa_train(const GridSpec& env, const EncoderConfig& enc, const SarsaConfig& cfg);

// Index of the largest entry; ties broken uniformly at random.
int argmax_random_tie(std::span<const double> values, Rng& rng);

// Greedy rollout of a value net on exact rates.
EpisodeStats greedy_episode(const DensePolicyNet& net, const GridSpec& env, const EncoderConfig& enc, int max_steps,
                            Rng& rng);

// Deterministic integrate-and-fire network with rate decoding. Each step the
// membrane integrates the weighted input spikes plus a constant bias current;
// a spike is emitted when it exceeds the threshold, which is then subtracted.
struct IfSnn {
  int n_in = 0;
  int n_out = 0;
  std::vector<double> weights;        // [j][i]
  std::vector<double> bias_currents;  // per output, added every step
  std::vector<double> thresholds;     // per output, > 0

  std::span<const double> weights_of(int j) const {
    return {weights.data() + static_cast<std::size_t>(j * n_in), static_cast<std::size_t>(n_in)};
  }
  void validate() const;
};

// Data-based max normalisation over every grid cell: all parameters are
// divided by the largest positive pre-activation seen; thresholds become 1.
// Throws ConversionError when no pre-activation is positive.
IfSnn convert_to_if(const DensePolicyNet& net, const GridSpec& env, const EncoderConfig& enc);

// Largest pre-activation over all cells and actions (the normaliser).
double max_pre_activation(const DensePolicyNet& net, const GridSpec& env, const EncoderConfig& enc);

struct IfOutcome {
  Action action = Action::Up;
  std::vector<int> spike_counts;
  long input_spikes = 0;
  long output_spikes = 0;
};

IfOutcome if_snn_infer(const IfSnn& snn, const SpikeTrainBatch& x, Rng& rng);

Decision decide_if(const IfSnn& snn, const EncoderConfig& enc, Cell state, int horizon, Rng& rng);

TestSummary evaluate_if(const IfSnn& snn, const GridSpec& env, const EncoderConfig& enc, int horizon, int episodes,
                        int max_steps, Rng& rng);

}  // namespace spikerl
