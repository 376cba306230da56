#include "spikerl/glm_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spikerl/kernels.hpp"

namespace spikerl {

void PolicyShape::validate() const {
  if (n_in < 1) throw std::invalid_argument("policy: n_in must be positive");
  if (n_out < 1) throw std::invalid_argument("policy: n_out must be positive");
  if (horizon < 1) throw std::invalid_argument("policy: horizon must be positive");
  if (tau_s < 1 || k_s < 1) throw std::invalid_argument("policy: tau_s and k_s must be positive");
  if (k_s > tau_s) throw std::invalid_argument("policy: k_s must not exceed tau_s");
  if (basis == BasisMode::Identity && k_s != tau_s)
    throw std::invalid_argument("policy: identity basis requires k_s == tau_s");
}

namespace {

const PolicyShape& checked(const PolicyShape& shape) {
  shape.validate();
  return shape;
}

void check_input(const GlmPolicy& policy, const SpikeTrainBatch& x) {
  if (x.n_inputs() != policy.n_in())
    throw std::invalid_argument("policy expects " + std::to_string(policy.n_in()) + " inputs, got " +
                                std::to_string(x.n_inputs()));
  if (x.horizon() != policy.horizon())
    throw std::invalid_argument("policy expects horizon " + std::to_string(policy.horizon()) + ", got " +
                                std::to_string(x.horizon()));
}

double softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

// log p_t(j) for every t, where p_t(j) is the probability that neuron j
// spikes alone first at step t.
std::vector<double> first_spike_log_probs(const PolicyActivity& act, int j) {
  const int T = act.horizon;
  std::vector<double> others_survive(static_cast<std::size_t>(T), 0.0);  // sum_{k != j} log(1 - s) through t
  for (int k = 0; k < act.n_out; ++k) {
    if (k == j) continue;
    double run = 0.0;
    for (int t = 0; t < T; ++t) {
      run += log1m_sigmoid(act.potential(k, t));
      others_survive[static_cast<std::size_t>(t)] += run;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(T));
  double own_quiet = 0.0;  // sum log(1 - s_j) before t
  for (int t = 0; t < T; ++t) {
    const double u = act.potential(j, t);
    out[static_cast<std::size_t>(t)] = others_survive[static_cast<std::size_t>(t)] + log_sigmoid(u) + own_quiet;
    own_quiet += log1m_sigmoid(u);
  }
  return out;
}

}  // namespace

GlmPolicy::GlmPolicy(const PolicyShape& shape)
    : shape_(checked(shape)),
      basis_(BasisMatrix::make(shape.basis, shape.tau_s, shape.k_s)),
      weights_(static_cast<std::size_t>(shape.n_out) * static_cast<std::size_t>(shape.n_in * shape.k_s), 0.0),
      biases_(static_cast<std::size_t>(shape.n_out), 0.0) {}

GlmPolicy GlmPolicy::randomly_initialized(const PolicyShape& shape, Rng& rng, double scale) {
  GlmPolicy p(shape);
  for (double& w : p.weights_) w = rng.uniform(-scale, scale);
  return p;
}

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double log_sigmoid(double u) { return -softplus(-u); }
double log1m_sigmoid(double u) { return -softplus(u); }

PolicyActivity evaluate(const GlmPolicy& policy, const SpikeTrainBatch& x) {
  check_input(policy, x);
  const auto& shape = policy.shape();
  const BasisMatrix& basis = policy.basis();
  const int T = shape.horizon;
  const int K = shape.k_s;

  PolicyActivity act;
  act.horizon = T;
  act.n_out = shape.n_out;
  act.feature_size = policy.block_size();
  act.features.assign(static_cast<std::size_t>(T) * act.feature_size, 0.0);
  act.potentials.assign(static_cast<std::size_t>(shape.n_out * T), 0.0);

  for (int i = 0; i < shape.n_in; ++i) {
    const auto row = x.row(i);
    if (std::none_of(row.begin(), row.end(), [](std::uint8_t b) { return b != 0; })) continue;
    for (int t = 0; t < T; ++t) {
      double* phi = act.features.data() + static_cast<std::size_t>(t) * act.feature_size +
                    static_cast<std::size_t>(i * K);
      const int max_lag = std::min(shape.tau_s, t);
      for (int lag = 1; lag <= max_lag; ++lag) {
        if (!row[static_cast<std::size_t>(t - lag)]) continue;
        for (int k = 0; k < K; ++k) phi[k] += basis.at(lag - 1, k);
      }
    }
  }

  for (int j = 0; j < shape.n_out; ++j) {
    const auto w = policy.weights_of(j);
    const double b = policy.biases()[static_cast<std::size_t>(j)];
    for (int t = 0; t < T; ++t)
      act.potentials[static_cast<std::size_t>(j * T + t)] = b + kernels::dot(w, act.features_at(t));
  }
  return act;
}

double membrane_potential(const GlmPolicy& policy, int j, int t, const SpikeTrainBatch& x) {
  check_input(policy, x);
  if (j < 0 || j >= policy.n_out()) throw std::invalid_argument("membrane_potential: output index out of range");
  if (t < 0 || t >= policy.horizon()) throw std::invalid_argument("membrane_potential: time out of range");
  const BasisMatrix& basis = policy.basis();
  double u = policy.biases()[static_cast<std::size_t>(j)];
  for (int i = 0; i < policy.n_in(); ++i) {
    for (int lag = 1; lag <= basis.tau_s(); ++lag) {
      if (t - lag < 0) break;
      double alpha = 0.0;
      for (int k = 0; k < basis.k_s(); ++k) alpha += basis.at(lag - 1, k) * policy.weight(i, j, k);
      u += alpha * x.at(i, t - lag);
    }
  }
  return u;
}

FirstSpikeOutcome simulate_first_to_spike(const GlmPolicy& policy, const SpikeTrainBatch& x, Rng& rng) {
  return simulate_first_to_spike(evaluate(policy, x), x, rng);
}

FirstSpikeOutcome simulate_first_to_spike(const PolicyActivity& act, const SpikeTrainBatch& x, Rng& rng) {
  FirstSpikeOutcome out;
  std::vector<int> spikers;
  spikers.reserve(static_cast<std::size_t>(act.n_out));
  for (int t = 0; t < act.horizon; ++t) {
    spikers.clear();
    for (int j = 0; j < act.n_out; ++j)
      if (rng.bernoulli(sigmoid(act.potential(j, t)))) spikers.push_back(j);
    if (spikers.empty()) continue;
    out.neuron = spikers[spikers.size() == 1 ? 0 : rng.index(spikers.size())];
    out.spike_time = t + 1;
    out.tie_size = static_cast<int>(spikers.size());
    out.output_spike_count = out.tie_size;
    out.input_spikes_consumed = x.count_through(t);
    return out;
  }
  out.input_spikes_consumed = x.count();
  return out;
}

double ActionDistribution::total() const {
  double s = tie_mass + silence_mass;
  for (double p : per_action) s += p;
  return s;
}

ActionDistribution action_distribution(const GlmPolicy& policy, const SpikeTrainBatch& x) {
  return action_distribution(evaluate(policy, x));
}

ActionDistribution action_distribution(const PolicyActivity& act) {
  ActionDistribution dist;
  dist.per_action.assign(static_cast<std::size_t>(act.n_out), 0.0);
  double log_silence = 0.0;
  for (int j = 0; j < act.n_out; ++j) {
    for (double lp : first_spike_log_probs(act, j)) dist.per_action[static_cast<std::size_t>(j)] += std::exp(lp);
    for (int t = 0; t < act.horizon; ++t) log_silence += log1m_sigmoid(act.potential(j, t));
  }
  dist.silence_mass = std::exp(log_silence);
  double clean = 0.0;
  for (double p : dist.per_action) clean += p;
  dist.tie_mass = std::max(0.0, 1.0 - clean - dist.silence_mass);
  return dist;
}

std::vector<double> sampler_choice_probabilities(const PolicyActivity& act) {
  const int n = act.n_out;
  if (n > 16) throw std::invalid_argument("sampler_choice_probabilities: too many outputs");
  std::vector<double> choice(static_cast<std::size_t>(n), 0.0);
  double survive = 1.0;  // no output spike before t
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int t = 0; t < act.horizon; ++t) {
    for (int j = 0; j < n; ++j) s[static_cast<std::size_t>(j)] = sigmoid(act.potential(j, t));
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      double p = survive;
      int size = 0;
      for (int j = 0; j < n; ++j) {
        const bool fires = mask & (1u << j);
        p *= fires ? s[static_cast<std::size_t>(j)] : 1.0 - s[static_cast<std::size_t>(j)];
        size += fires;
      }
      for (int j = 0; j < n; ++j)
        if (mask & (1u << j)) choice[static_cast<std::size_t>(j)] += p / size;
    }
    for (int j = 0; j < n; ++j) survive *= 1.0 - s[static_cast<std::size_t>(j)];
  }
  return choice;
}

double log_action_probability(const PolicyActivity& act, int action) {
  const auto lp = first_spike_log_probs(act, action);
  const double m = *std::max_element(lp.begin(), lp.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double z = 0.0;
  for (double v : lp) z += std::exp(v - m);
  return m + std::log(z);
}

GradientAccumulator log_policy_gradient(const GlmPolicy& policy, const SpikeTrainBatch& x, int action) {
  return log_policy_gradient(policy, evaluate(policy, x), action);
}

GradientAccumulator log_policy_gradient(const GlmPolicy& policy, const PolicyActivity& act, int action) {
  if (action < 0 || action >= policy.n_out()) throw std::invalid_argument("log_policy_gradient: bad action");
  const int T = act.horizon;
  const auto lp = first_spike_log_probs(act, action);
  const double m = *std::max_element(lp.begin(), lp.end());
  if (!std::isfinite(m)) throw std::domain_error("log_policy_gradient: action has zero probability");

  // q_t: posterior over the first-spike time given the action; h_t = sum_{t' >= t} q_t'.
  std::vector<double> q(static_cast<std::size_t>(T));
  double z = 0.0;
  for (int t = 0; t < T; ++t) z += (q[static_cast<std::size_t>(t)] = std::exp(lp[static_cast<std::size_t>(t)] - m));
  for (double& v : q) v /= z;
  std::vector<double> h(static_cast<std::size_t>(T));
  double tail = 0.0;
  for (int t = T - 1; t >= 0; --t) h[static_cast<std::size_t>(t)] = (tail += q[static_cast<std::size_t>(t)]);

  GradientAccumulator grad = policy.zero_gradient();
  const std::size_t block = policy.block_size();
  for (int k = 0; k < policy.n_out(); ++k) {
    std::span<double> dw(grad.d_weights.data() + static_cast<std::size_t>(k) * block, block);
    double db = 0.0;
    for (int t = 0; t < T; ++t) {
      double c = -h[static_cast<std::size_t>(t)] * sigmoid(act.potential(k, t));
      if (k == action) c += q[static_cast<std::size_t>(t)];
      db += c;
      if (c != 0.0) kernels::axpy(c, act.features_at(t), dw);
    }
    grad.d_biases[static_cast<std::size_t>(k)] = db;
  }
  return grad;
}

}  // namespace spikerl
