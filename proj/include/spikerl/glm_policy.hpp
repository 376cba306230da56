#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spikerl/basis.hpp"
#include "spikerl/encoding.hpp"
#include "spikerl/gradient.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

struct PolicyShape {
  int n_in = 70;
  int n_out = 4;
  int horizon = 8;
  int tau_s = 4;
  int k_s = 4;
  BasisMode basis = BasisMode::Identity;

  void validate() const;
};

// Two-layer probabilistic SNN. Output neuron j spikes at step t with
// probability sigmoid(u_{j,t}), where u is the basis-filtered input history
// plus a bias. There is no self-history term.
//
// Weights are stored output-major: [j][i][k], so each output neuron owns a
// contiguous n_in * k_s block.
class GlmPolicy {
 public:
  explicit GlmPolicy(const PolicyShape& shape);

  // Weights i.i.d. uniform in [-scale, scale], biases zero.
  static GlmPolicy randomly_initialized(const PolicyShape& shape, Rng& rng, double scale = 0.1);

  const PolicyShape& shape() const { return shape_; }
  const BasisMatrix& basis() const { return basis_; }
  int n_in() const { return shape_.n_in; }
  int n_out() const { return shape_.n_out; }
  int horizon() const { return shape_.horizon; }

  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> biases() { return biases_; }
  std::span<const double> biases() const { return biases_; }

  std::span<const double> weights_of(int j) const { return {weights_.data() + block(j), block_size()}; }

  double& weight(int i, int j, int k) { return weights_[index(i, j, k)]; }
  double weight(int i, int j, int k) const { return weights_[index(i, j, k)]; }

  std::size_t block_size() const { return static_cast<std::size_t>(shape_.n_in * shape_.k_s); }
  std::size_t index(int i, int j, int k) const {
    return block(j) + static_cast<std::size_t>(i * shape_.k_s + k);
  }

  GradientAccumulator zero_gradient() const { return {std::vector<double>(weights_.size(), 0.0),
                                                       std::vector<double>(biases_.size(), 0.0)}; }

  friend bool operator==(const GlmPolicy& a, const GlmPolicy& b) {
    return a.weights_ == b.weights_ && a.biases_ == b.biases_;
  }

 private:
  std::size_t block(int j) const { return static_cast<std::size_t>(j) * block_size(); }

  PolicyShape shape_;
  BasisMatrix basis_;
  std::vector<double> weights_;
  std::vector<double> biases_;
};

double sigmoid(double u);
// log(sigmoid(u)) and log(1 - sigmoid(u)) without cancellation.
double log_sigmoid(double u);
double log1m_sigmoid(double u);

// Filtered inputs and membrane potentials of one presentation.
struct PolicyActivity {
  int horizon = 0;
  int n_out = 0;
  std::size_t feature_size = 0;       // n_in * k_s
  std::vector<double> features;       // [t][i][k], B^T applied to the lag window before t
  std::vector<double> potentials;     // [j][t]

  std::span<const double> features_at(int t) const {
    return {features.data() + static_cast<std::size_t>(t) * feature_size, feature_size};
  }
  double potential(int j, int t) const { return potentials[static_cast<std::size_t>(j * horizon + t)]; }
};

// Throws std::invalid_argument on a dimension mismatch.
PolicyActivity evaluate(const GlmPolicy& policy, const SpikeTrainBatch& x);

// Direct evaluation of u_{j,t} (t 0-based) from the kernel alpha = B w,
// independent of evaluate().
double membrane_potential(const GlmPolicy& policy, int j, int t, const SpikeTrainBatch& x);

struct FirstSpikeOutcome {
  std::optional<int> neuron;     // empty on silence
  int spike_time = 0;            // 1-based tau of the first output spike, 0 on silence
  int tie_size = 0;              // simultaneous first spikers
  int output_spike_count = 0;    // equals tie_size
  int input_spikes_consumed = 0; // input bits with tau <= spike_time (<= T on silence)

  bool silent() const { return !neuron.has_value(); }
};

FirstSpikeOutcome simulate_first_to_spike(const GlmPolicy& policy, const SpikeTrainBatch& x, Rng& rng);
FirstSpikeOutcome simulate_first_to_spike(const PolicyActivity& activity, const SpikeTrainBatch& x, Rng& rng);

// Exact first-spike distribution. per_action[j] counts only clean first
// spikes; simultaneous first spikes go to tie_mass.
struct ActionDistribution {
  std::vector<double> per_action;
  double tie_mass = 0.0;
  double silence_mass = 0.0;

  double total() const;
};

ActionDistribution action_distribution(const GlmPolicy& policy, const SpikeTrainBatch& x);
ActionDistribution action_distribution(const PolicyActivity& activity);

// Probability that the sampler returns each neuron: clean first spikes plus
// each tie shared uniformly among the neurons in it. Enumerates spike subsets
// per time step, so n_out is limited to 16.
std::vector<double> sampler_choice_probabilities(const PolicyActivity& activity);

// Gradient of log Pr(A = action) with respect to weights and biases.
// Throws std::domain_error when the action has zero probability.
GradientAccumulator log_policy_gradient(const GlmPolicy& policy, const SpikeTrainBatch& x, int action);
GradientAccumulator log_policy_gradient(const GlmPolicy& policy, const PolicyActivity& activity, int action);

// log Pr(A = action) from the exact distribution.
double log_action_probability(const PolicyActivity& activity, int action);

}  // namespace spikerl
