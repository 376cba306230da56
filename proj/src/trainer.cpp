#include "spikerl/trainer.hpp"

#include <stdexcept>
#include <string>

#include "spikerl/kernels.hpp"

namespace spikerl {

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("train.gamma: must lie in (0, 1)");
  if (!(eta0 > 0.0)) throw std::invalid_argument("train.eta0: must be positive");
  if (!(schedule_k >= 0.0)) throw std::invalid_argument("train.schedule_k: must be non-negative");
  if (epochs < 0 || episodes_per_epoch < 0 || test_episodes < 0)
    throw std::invalid_argument("train: epoch and episode counts must be non-negative");
  if (max_episode_steps < 1) throw std::invalid_argument("train.max_episode_steps: must be at least 1");
  if (max_represent < 1) throw std::invalid_argument("train.max_represent: must be at least 1");
}

std::vector<double> EpisodeTrace::rewards() const {
  std::vector<double> r;
  r.reserve(steps.size());
  for (const auto& s : steps) r.push_back(s.reward);
  return r;
}

EpisodeStats episode_stats(const EpisodeTrace& trace) {
  EpisodeStats st;
  st.steps = trace.total_steps();
  st.reached_goal = trace.reached_goal;
  double latency = 0.0;
  for (const auto& s : trace.steps) {
    st.input_spikes += s.decision.input_spikes;
    st.output_spikes += s.decision.output_spikes;
    latency += s.decision.latency;
  }
  st.decision_latency_mean = st.steps > 0 ? latency / st.steps : 0.0;
  return st;
}

Decision decide_first_to_spike(const GlmPolicy& policy, const EncoderConfig& enc, Cell state, int max_represent,
                               bool with_gradient, Rng& rng) {
  Decision d;
  for (int attempt = 1; attempt <= max_represent; ++attempt) {
    const SpikeTrainBatch x = encode(enc, state, rng);
    const PolicyActivity act = evaluate(policy, x);
    const FirstSpikeOutcome fs = simulate_first_to_spike(act, x, rng);
    d.presentations = attempt;
    d.input_spikes += fs.input_spikes_consumed;
    d.output_spikes += fs.output_spike_count;
    if (fs.silent()) continue;
    d.action = action_from_index(*fs.neuron);
    d.spike_time = fs.spike_time;
    d.latency = (attempt - 1) * policy.horizon() + fs.spike_time;
    if (with_gradient) {
      try {
        d.gradient = log_policy_gradient(policy, act, *fs.neuron);
      } catch (const std::domain_error&) {
        // sampled through an underflowed tie; no usable gradient
      }
    }
    return d;
  }
  d.action = action_from_index(static_cast<int>(rng.index(kNumActions)));
  d.latency = max_represent * policy.horizon();
  return d;
}

EpisodeTrace run_episode(const GlmPolicy& policy, const GridSpec& env, const EncoderConfig& enc,
                         const TrainConfig& cfg, Rng& rng, bool with_gradients) {
  if (policy.n_in() != enc.n_inputs())
    throw std::invalid_argument("run_episode: policy has " + std::to_string(policy.n_in()) +
                                " inputs, encoder produces " + std::to_string(enc.n_inputs()));
  if (policy.n_out() != kNumActions) throw std::invalid_argument("run_episode: policy must have 4 outputs");
  if (policy.horizon() != enc.horizon) throw std::invalid_argument("run_episode: horizon mismatch");
  return rollout(env, cfg.max_episode_steps, [&](Cell s) {
    return decide_first_to_spike(policy, enc, s, cfg.max_represent, with_gradients, rng);
  });
}

std::vector<double> returns(std::span<const double> rewards, double gamma) {
  std::vector<double> v(rewards.size());
  double next = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) next = v[t] = rewards[t] + gamma * next;
  return v;
}

void apply_update(std::span<double> weights, std::span<double> biases, const EpisodeTrace& trace,
                  std::span<const double> v, double eta) {
  if (v.size() != trace.steps.size()) throw std::invalid_argument("apply_update: returns and trace differ in length");
  for (std::size_t t = trace.steps.size(); t-- > 0;) {
    const auto& g = trace.steps[t].decision.gradient;
    if (!g || v[t] == 0.0) continue;
    if (g->d_weights.size() != weights.size() || g->d_biases.size() != biases.size())
      throw std::invalid_argument("apply_update: gradient shape does not match the model");
    const double scale = eta * v[t];
    kernels::axpy(scale, g->d_weights, weights);
    kernels::axpy(scale, g->d_biases, biases);
  }
}

double learning_rate(const TrainConfig& cfg, long i) {
  return cfg.eta0 / (1.0 + cfg.schedule_k * static_cast<double>(i - 1));
}

TestSummary summarize_tests(int epoch, std::span<const EpisodeStats> episodes) {
  TestSummary s;
  s.epoch = epoch;
  s.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return s;
  for (const auto& e : episodes) {
    s.mean_steps += e.steps;
    s.goal_rate += e.reached_goal ? 1.0 : 0.0;
    s.mean_input_spikes += static_cast<double>(e.input_spikes);
    s.mean_output_spikes += static_cast<double>(e.output_spikes);
    s.mean_decision_latency += e.decision_latency_mean;
  }
  const double n = static_cast<double>(episodes.size());
  s.mean_steps /= n;
  s.goal_rate /= n;
  s.mean_input_spikes /= n;
  s.mean_output_spikes /= n;
  s.mean_decision_latency /= n;
  return s;
}

GlmTrainResult train(const GridSpec& env, const EncoderConfig& enc, const TrainConfig& cfg, int tau_s, int k_s,
                     BasisMode basis) {
  env.validate();
  enc.validate();
  cfg.validate();
  Rng init = make_stream(cfg.seed, Stream::Init);
  PolicyShape shape{enc.n_inputs(), kNumActions, enc.horizon, tau_s, k_s, basis};
  GlmTrainResult result{GlmPolicy::randomly_initialized(shape, init), {}};
  result.metrics = train(result.policy, env, enc, cfg);
  return result;
}

MetricsSeries train(GlmPolicy& policy, const GridSpec& env, const EncoderConfig& enc, const TrainConfig& cfg) {
  return run_policy_gradient(policy, cfg, [&](const GlmPolicy& p, Rng& rng, bool learn) {
    return run_episode(p, env, enc, cfg, rng, learn);
  });
}

TestSummary evaluate_policy(const GlmPolicy& policy, const GridSpec& env, const EncoderConfig& enc,
                            const TrainConfig& cfg, int episodes, Rng& rng) {
  std::vector<EpisodeStats> stats;
  for (int e = 0; e < episodes; ++e) stats.push_back(episode_stats(run_episode(policy, env, enc, cfg, rng, false)));
  return summarize_tests(0, stats);
}

}  // namespace spikerl
