#include "spikerl/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spikerl/kernels.hpp"

namespace spikerl {

namespace {

// Relative slack on the strict spike condition so that drives which sum to the
// threshold in exact arithmetic do not fire on accumulated rounding.
constexpr double kThresholdSlack = 1e-9;

void require_mode(const DensePolicyNet& net, OutputMode mode, const char* what) {
  if (net.mode() != mode) throw InvalidModeError(std::string(what) + ": wrong output mode");
}

}  // namespace

DensePolicyNet::DensePolicyNet(int n_in, int n_out, OutputMode mode)
    : n_in_(n_in),
      n_out_(n_out),
      mode_(mode),
      weights_(static_cast<std::size_t>(n_in * n_out), 0.0),
      biases_(static_cast<std::size_t>(n_out), 0.0) {
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("dense net: dimensions must be positive");
}

std::vector<double> DensePolicyNet::pre_activations(std::span<const double> rates) const {
  if (static_cast<int>(rates.size()) != n_in_) throw std::invalid_argument("dense net: rate vector size mismatch");
  std::vector<double> z(static_cast<std::size_t>(n_out_));
  for (int j = 0; j < n_out_; ++j) z[static_cast<std::size_t>(j)] = biases_[static_cast<std::size_t>(j)] +
                                                                    kernels::dot(weights_of(j), rates);
  return z;
}

std::vector<double> DensePolicyNet::outputs(std::span<const double> rates) const {
  auto z = pre_activations(rates);
  if (mode_ == OutputMode::Softmax) return softmax(z);
  for (double& v : z) v = std::max(v, 0.0);
  return z;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) z += (p[j] = std::exp(logits[j] - m));
  for (double& v : p) v /= z;
  return p;
}

Action ann_pg_act(const DensePolicyNet& net, std::span<const double> rates, Rng& rng) {
  require_mode(net, OutputMode::Softmax, "ann_pg_act");
  const auto p = net.outputs(rates);
  double u = rng.uniform();
  for (std::size_t j = 0; j + 1 < p.size(); ++j) {
    if (u < p[j]) return action_from_index(static_cast<int>(j));
    u -= p[j];
  }
  return action_from_index(static_cast<int>(p.size()) - 1);
}

GradientAccumulator ann_pg_gradient(const DensePolicyNet& net, std::span<const double> rates, Action a) {
  require_mode(net, OutputMode::Softmax, "ann_pg_gradient");
  const auto p = net.outputs(rates);
  GradientAccumulator g{std::vector<double>(net.weights().size(), 0.0), std::vector<double>(p.size(), 0.0)};
  for (int j = 0; j < net.n_out(); ++j) {
    const double d = (j == action_index(a) ? 1.0 : 0.0) - p[static_cast<std::size_t>(j)];
    g.d_biases[static_cast<std::size_t>(j)] = d;
    std::span<double> dw(g.d_weights.data() + static_cast<std::size_t>(j * net.n_in()),
                         static_cast<std::size_t>(net.n_in()));
    kernels::axpy(d, rates, dw);
  }
  return g;
}

AnnTrainResult train_ann_pg(const GridSpec& env, const EncoderConfig& enc, const TrainConfig& cfg) {
  env.validate();
  enc.validate();
  cfg.validate();
  AnnTrainResult result{DensePolicyNet(enc.n_inputs(), kNumActions, OutputMode::Softmax), {}};
  Rng init = make_stream(cfg.seed, Stream::Init);
  for (double& w : result.net.weights()) w = init.uniform(-0.1, 0.1);

  std::vector<std::vector<double>> rates;
  for (const Cell& c : all_cells(env)) rates.push_back(rate_vector(enc, c));
  auto rates_of = [&](Cell c) -> const std::vector<double>& {
    return rates[static_cast<std::size_t>((c.row - 1) * env.cols + (c.col - 1))];
  };

  result.metrics = run_policy_gradient(result.net, cfg, [&](const DensePolicyNet& net, Rng& rng, bool learn) {
    return rollout(env, cfg.max_episode_steps, [&](Cell s) {
      Decision d;
      d.action = ann_pg_act(net, rates_of(s), rng);
      if (learn) d.gradient = ann_pg_gradient(net, rates_of(s), d.action);
      return d;
    });
  });
  return result;
}

void SarsaConfig::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("sarsa.alpha: must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("sarsa.gamma: must lie in (0, 1)");
  if (!(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0))
    throw std::invalid_argument("sarsa.eps_start, sarsa.eps_end: must lie in [0, 1]");
  if (!(anneal_fraction > 0.0 && anneal_fraction <= 1.0))
    throw std::invalid_argument("sarsa.anneal_fraction: must lie in (0, 1]");
  if (episodes < 0) throw std::invalid_argument("sarsa.episodes: must be non-negative");
  if (max_episode_steps < 1) throw std::invalid_argument("sarsa.max_episode_steps: must be at least 1");
}

double SarsaConfig::epsilon(int episode) const {
  const double horizon = anneal_fraction * episodes;
  if (horizon <= 0.0 || episode >= horizon) return eps_end;
  return eps_start + (eps_end - eps_start) * (episode / horizon);
}

int argmax_random_tie(std::span<const double> values, Rng& rng) {
  const double best = *std::max_element(values.begin(), values.end());
  int ties = 0;
  for (double v : values) ties += v == best;
  auto pick = static_cast<int>(ties == 1 ? 0 : rng.index(static_cast<std::size_t>(ties)));
  for (std::size_t j = 0; j < values.size(); ++j)
    if (values[j] == best && pick-- == 0) return static_cast<int>(j);
  return 0;
}

int epsilon_greedy(std::span<const double> q, double eps, Rng& rng) {
  if (rng.bernoulli(eps)) return static_cast<int>(rng.index(q.size()));
  return argmax_random_tie(q, rng);
}

void sarsa_update(DensePolicyNet& net, std::span<const double> rates, int a, double pre, double target,
                  double alpha) {
  if (pre < 0.0) return;
  const double step_size = alpha * (target - pre);
  std::span<double> wa(net.weights().data() + static_cast<std::size_t>(a * net.n_in()),
                       static_cast<std::size_t>(net.n_in()));
  kernels::axpy(step_size, rates, wa);
  net.biases()[static_cast<std::size_t>(a)] += step_size;
}

SarsaResult sarsa_train(const GridSpec& env, const EncoderConfig& enc, const SarsaConfig& cfg) {
  env.validate();
  enc.validate();
  cfg.validate();
  SarsaResult result{DensePolicyNet(enc.n_inputs(), kNumActions, OutputMode::Relu), {}};
  DensePolicyNet& net = result.net;
  Rng init = make_stream(cfg.seed, Stream::Init);
  for (double& w : net.weights()) w = init.uniform(0.0, 0.01);
  for (double& b : net.biases()) b = cfg.q_init;
  Rng rng = make_stream(cfg.seed, Stream::Train);

  std::vector<std::vector<double>> rates;
  for (const Cell& c : all_cells(env)) rates.push_back(rate_vector(enc, c));
  auto rates_of = [&](Cell c) -> const std::vector<double>& {
    return rates[static_cast<std::size_t>((c.row - 1) * env.cols + (c.col - 1))];
  };
  auto choose = [&](const std::vector<double>& q, double eps) { return epsilon_greedy(q, eps, rng); };

  for (int e = 0; e < cfg.episodes; ++e) {
    const double eps = cfg.epsilon(e);
    EpisodeStats st;
    Cell s = reset(env);
    auto pre = net.pre_activations(rates_of(s));
    auto q = net.outputs(rates_of(s));
    int a = choose(q, eps);
    for (int t = 0; t < cfg.max_episode_steps; ++t) {
      const StepOutcome out = step(env, s, action_from_index(a));
      ++st.steps;
      double target = out.reward;
      std::vector<double> next_pre, next_q;
      int next_a = 0;
      if (!out.done) {
        next_pre = net.pre_activations(rates_of(out.next));
        next_q = net.outputs(rates_of(out.next));
        next_a = choose(next_q, eps);
        target += cfg.gamma * next_q[static_cast<std::size_t>(next_a)];
      }
      sarsa_update(net, rates_of(s), a, pre[static_cast<std::size_t>(a)], target, cfg.alpha);
      if (out.done) {
        st.reached_goal = true;
        break;
      }
      s = out.next;
      a = next_a;
      pre = std::move(next_pre);
      q = std::move(next_q);
    }
    result.episodes.push_back(st);
  }
  return result;
}

EpisodeStats greedy_episode(const DensePolicyNet& net, const GridSpec& env, const EncoderConfig& enc, int max_steps,
                            Rng& rng) {
  const EpisodeTrace trace = rollout(env, max_steps, [&](Cell s) {
    Decision d;
    d.action = action_from_index(argmax_random_tie(net.outputs(rate_vector(enc, s)), rng));
    return d;
  });
  return episode_stats(trace);
}

void IfSnn::validate() const {
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("IF SNN: dimensions must be positive");
  if (weights.size() != static_cast<std::size_t>(n_in * n_out) || bias_currents.size() != static_cast<std::size_t>(n_out) ||
      thresholds.size() != static_cast<std::size_t>(n_out))
    throw std::invalid_argument("IF SNN: parameter sizes inconsistent");
  if (std::any_of(thresholds.begin(), thresholds.end(), [](double t) { return !(t > 0.0); }))
    throw std::invalid_argument("IF SNN: thresholds must be positive");
}

double max_pre_activation(const DensePolicyNet& net, const GridSpec& env, const EncoderConfig& enc) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Cell& c : all_cells(env))
    for (double z : net.pre_activations(rate_vector(enc, c))) best = std::max(best, z);
  return best;
}

IfSnn convert_to_if(const DensePolicyNet& net, const GridSpec& env, const EncoderConfig& enc) {
  const double lambda = max_pre_activation(net, env, enc);
  if (!(lambda > 0.0)) throw ConversionError("convert_to_if: no positive pre-activation over the state space");
  IfSnn snn;
  snn.n_in = net.n_in();
  snn.n_out = net.n_out();
  snn.weights.assign(net.weights().begin(), net.weights().end());
  snn.bias_currents.assign(net.biases().begin(), net.biases().end());
  for (double& w : snn.weights) w /= lambda;
  for (double& b : snn.bias_currents) b /= lambda;
  snn.thresholds.assign(static_cast<std::size_t>(snn.n_out), 1.0);
  return snn;
}

IfOutcome if_snn_infer(const IfSnn& snn, const SpikeTrainBatch& x, Rng& rng) {
  if (x.n_inputs() != snn.n_in) throw std::invalid_argument("if_snn_infer: input size mismatch");
  IfOutcome out;
  out.spike_counts.assign(static_cast<std::size_t>(snn.n_out), 0);
  std::vector<double> membrane(static_cast<std::size_t>(snn.n_out), 0.0);
  std::vector<double> column(static_cast<std::size_t>(snn.n_in), 0.0);
  for (int t = 0; t < x.horizon(); ++t) {
    for (int i = 0; i < snn.n_in; ++i) column[static_cast<std::size_t>(i)] = x.at(i, t);
    for (int j = 0; j < snn.n_out; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      membrane[ju] += kernels::dot(snn.weights_of(j), column) + snn.bias_currents[ju];
      if (membrane[ju] > snn.thresholds[ju] * (1.0 + kThresholdSlack)) {
        membrane[ju] -= snn.thresholds[ju];
        ++out.spike_counts[ju];
      }
    }
  }
  std::vector<double> counts(out.spike_counts.begin(), out.spike_counts.end());
  out.action = action_from_index(argmax_random_tie(counts, rng));
  out.input_spikes = x.count();
  for (int c : out.spike_counts) out.output_spikes += c;
  return out;
}

Decision decide_if(const IfSnn& snn, const EncoderConfig& enc, Cell state, int horizon, Rng& rng) {
  const SpikeTrainBatch x = encode(enc, state, horizon, rng);
  const IfOutcome o = if_snn_infer(snn, x, rng);
  Decision d;
  d.action = o.action;
  d.latency = horizon;
  d.input_spikes = o.input_spikes;
  d.output_spikes = o.output_spikes;
  return d;
}

TestSummary evaluate_if(const IfSnn& snn, const GridSpec& env, const EncoderConfig& enc, int horizon, int episodes,
                        int max_steps, Rng& rng) {
  std::vector<EpisodeStats> stats;
  stats.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e)
    stats.push_back(episode_stats(rollout(env, max_steps, [&](Cell s) { return decide_if(snn, enc, s, horizon, rng); })));
  return summarize_tests(0, stats);
}

}  // namespace spikerl
