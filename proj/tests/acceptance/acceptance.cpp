#include "acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "spikerl/baselines.hpp"
#include "spikerl/glm_policy.hpp"
#include "spikerl/gridworld.hpp"
#include "spikerl/harness.hpp"
#include "spikerl/trainer.hpp"

namespace spikerl::acceptance {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return r;
}

// Runs f(0..n-1) on a small thread pool; results land by index so order never matters.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  unsigned w = workers > 0 ? static_cast<unsigned>(workers) : std::thread::hardware_concurrency();
  w = std::clamp<unsigned>(w, 1, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (w == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

PolicyShape small_shape(Rng& rng) {
  PolicyShape s;
  s.n_in = 1 + static_cast<int>(rng.index(4));
  s.n_out = 1 + static_cast<int>(rng.index(3));
  s.horizon = 1 + static_cast<int>(rng.index(4));
  s.tau_s = 1 + static_cast<int>(rng.index(3));
  s.k_s = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(s.tau_s)));
  s.basis = s.k_s == s.tau_s && rng.bernoulli(0.5) ? BasisMode::Identity : BasisMode::RaisedCosine;
  return s;
}

CriterionResult distribution_oracle() {
  Rng rng(derive_seed(101, 1));
  double worst = 0.0, worst_total = 0.0;
  const int trials = 1000;
  for (int n = 0; n < trials; ++n) {
    const PolicyShape s = small_shape(rng);
    const GlmPolicy p = oracle::random_policy(s, rng, 3.0);
    const auto x = oracle::random_input(s.n_in, s.horizon, rng.uniform(), rng);
    const auto d = action_distribution(p, x);
    const auto e = oracle::enumerate(p, x);
    for (int j = 0; j < s.n_out; ++j) worst = std::max(worst, std::abs(d.per_action[j] - e.per_action[j]));
    worst = std::max({worst, std::abs(d.tie_mass - e.tie_mass), std::abs(d.silence_mass - e.silence_mass)});
    worst_total = std::max(worst_total, std::abs(d.total() - 1.0));
  }
  return {1, "distribution matches brute-force enumeration", worst <= 1e-10 && worst_total <= 1e-12,
          std::to_string(trials) + " instances, max abs error " + fmt("%.3g", worst) + " (tol 1e-10), max |total-1| " +
              fmt("%.3g", worst_total) + " (tol 1e-12)"};
}

CriterionResult gradient_oracle() {
  Rng rng(derive_seed(102, 1));
  double worst = 0.0;
  const int trials = 100;
  int done = 0;
  while (done < trials) {
    const PolicyShape s = small_shape(rng);
    const GlmPolicy p = oracle::random_policy(s, rng, 1.5);
    const auto x = oracle::random_input(s.n_in, s.horizon, 0.5, rng);
    const int a = static_cast<int>(rng.index(static_cast<std::size_t>(s.n_out)));
    if (oracle::enumerate(p, x).per_action[a] < 1e-6) continue;  // log pi too flat to difference reliably
    const auto g = log_policy_gradient(p, x, a);
    const auto fd = oracle::finite_difference_gradient(p, x, a, 1e-5);
    for (std::size_t i = 0; i < g.d_weights.size(); ++i)
      worst = std::max(worst, oracle::relative_error(g.d_weights[i], fd.d_weights[i]));
    for (std::size_t i = 0; i < g.d_biases.size(); ++i)
      worst = std::max(worst, oracle::relative_error(g.d_biases[i], fd.d_biases[i]));
    ++done;
  }
  return {2, "gradient matches central finite differences", worst <= 1e-5,
          std::to_string(trials) + " instances, max relative error " + fmt("%.3g", worst) + " (tol 1e-5)"};
}

CriterionResult sampler_consistency() {
  const int trials = 100000;
  Rng rng(derive_seed(103, 1));
  std::vector<std::pair<GlmPolicy, SpikeTrainBatch>> cases;
  {
    PolicyShape s;
    s.n_in = 1;
    s.n_out = 2;
    s.horizon = 2;
    s.tau_s = s.k_s = 1;
    cases.emplace_back(GlmPolicy(s), SpikeTrainBatch(1, 2));
  }
  for (int n = 0; n < 4; ++n) {
    PolicyShape s = small_shape(rng);
    s.n_out = 2 + static_cast<int>(rng.index(2));
    const GlmPolicy p = oracle::random_policy(s, rng, 1.0);
    cases.emplace_back(p, oracle::random_input(s.n_in, s.horizon, 0.5, rng));
  }
  double worst_z = 0.0;
  double canonical = 0.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& [p, x] = cases[c];
    const auto choice = oracle::enumerate(p, x).choice;
    std::vector<int> hits(static_cast<std::size_t>(p.n_out()), 0);
    for (int n = 0; n < trials; ++n) {
      const auto out = simulate_first_to_spike(p, x, rng);
      if (out.neuron) ++hits[static_cast<std::size_t>(*out.neuron)];
    }
    for (int j = 0; j < p.n_out(); ++j) {
      const double q = choice[static_cast<std::size_t>(j)];
      const double f = hits[static_cast<std::size_t>(j)] / static_cast<double>(trials);
      const double se = std::sqrt(std::max(q * (1 - q), 1e-12) / trials);
      worst_z = std::max(worst_z, std::abs(f - q) / se);
      if (c == 0 && j == 0) canonical = f;
    }
  }
  return {3, "sampler frequencies match exact choice probabilities", worst_z <= 3.0,
          std::to_string(cases.size()) + " instances x 1e5 trials, worst deviation " + fmt("%.2f", worst_z) +
              " SE (tol 3); sigma=0.5,T=2 case " + fmt("%.5f", canonical) + " vs 0.46875"};
}

struct FtsRun {
  MetricsSeries metrics;
};

struct LearningData {
  int optimum = 0;
  std::vector<FtsRun> t8;
  std::vector<FtsRun> t2;
  std::vector<SarsaResult> sarsa;
  std::vector<IfSnn> if_nets;
};

EncoderConfig encoder(const ExperimentConfig& p, int horizon) {
  EncoderConfig e = p.encoder;
  e.horizon = horizon;
  return e;
}

TrainConfig train_cfg(const ExperimentConfig& p, std::uint64_t seed) {
  TrainConfig t = p.train;
  t.seed = seed;
  return t;
}

double auc_first(const MetricsSeries& m, std::size_t episodes) {
  double s = 0.0;
  const std::size_t n = std::min(episodes, m.training.size());
  for (std::size_t i = 0; i < n; ++i) s += m.training[i].stats.steps;
  return n ? s / static_cast<double>(n) : 0.0;
}

CriterionResult convergence(const Options& o, const LearningData& d) {
  std::vector<double> steps, goal;
  std::ostringstream per_seed;
  for (const auto& r : d.t8) {
    steps.push_back(r.metrics.tests.back().mean_steps);
    goal.push_back(r.metrics.tests.back().goal_rate);
    per_seed << fmt(" %.1f", steps.back());
  }
  const auto s = mean_se(steps);
  const auto g = mean_se(goal);
  const double limit = 2.0 * d.optimum;
  const int episodes = o.profile.train.epochs * o.profile.train.episodes_per_epoch;
  return {4, "fts-snn converges near the optimum (T=8)", s.mean <= limit && g.mean >= 0.95,
          std::to_string(d.t8.size()) + " seeds x " + std::to_string(episodes) + " episodes: final test steps " +
              fmt("%.2f", s.mean) + " (limit 2x" + std::to_string(d.optimum) + "=" + fmt("%.0f", limit) +
              "; per seed" + per_seed.str() + "), goal rate " + fmt("%.3f", g.mean) + " (min 0.95)"};
}

CriterionResult horizon_trend(const LearningData& d) {
  std::vector<double> a8, a2;
  for (const auto& r : d.t8) a8.push_back(auc_first(r.metrics, 2000));
  for (const auto& r : d.t2) a2.push_back(auc_first(r.metrics, 2000));
  const auto m8 = mean_se(a8);
  const auto m2 = mean_se(a2);
  const bool pass = m8.mean < m2.mean && m8.mean + m8.se < m2.mean - m2.se;
  return {5, "learning is faster for T=8 than T=2", pass,
          "mean steps over first 2000 episodes: T=8 " + fmt("%.1f", m8.mean) + " +/- " + fmt("%.1f", m8.se) +
              ", T=2 " + fmt("%.1f", m2.mean) + " +/- " + fmt("%.1f", m2.se)};
}

CriterionResult energy(const Options& o, const LearningData& d) {
  std::vector<double> fs, fsp;
  for (const auto& r : d.t8) {
    fs.push_back(r.metrics.tests.back().mean_steps);
    fsp.push_back(r.metrics.tests.back().mean_total_spikes());
  }
  const double fts_steps = mean_se(fs).mean;
  const double fts_spikes = mean_se(fsp).mean;
  const EncoderConfig enc = encoder(o.profile, o.profile.encoder.horizon);
  std::ostringstream sweep;
  std::optional<std::pair<int, double>> matched;
  double matched_steps = 0.0;
  for (int t_if : o.if_horizons) {
    std::vector<double> st(d.if_nets.size()), sp(d.if_nets.size());
    parallel_for(d.if_nets.size(), o.workers, [&](std::size_t k) {
      Rng rng(derive_seed(o.profile.seeds[k], 200 + static_cast<std::uint64_t>(t_if)));
      const auto ts = evaluate_if(d.if_nets[k], o.profile.grid, enc, t_if, o.profile.train.test_episodes,
                                  o.profile.train.max_episode_steps, rng);
      st[k] = ts.mean_steps;
      sp[k] = ts.mean_total_spikes();
    });
    const double steps = mean_se(st).mean;
    const double spikes = mean_se(sp).mean;
    sweep << " T_if=" << t_if << ":" << fmt("%.1f", steps) << "/" << fmt("%.0f", spikes);
    if (!matched && std::abs(steps - fts_steps) <= 0.1 * std::max(steps, fts_steps)) {
      matched = {t_if, spikes};
      matched_steps = steps;
    }
  }
  if (!matched)
    return {6, "IF network spends more spikes at matched performance", false,
            "no T_if within 10% of fts-snn steps " + fmt("%.2f", fts_steps) + "; steps/spikes:" + sweep.str()};
  const double ratio = matched->second / fts_spikes;
  return {6, "IF network spends more spikes at matched performance", ratio >= 3.0,
          "fts-snn " + fmt("%.2f", fts_steps) + " steps, " + fmt("%.1f", fts_spikes) + " spikes/episode; IF T_if=" +
              std::to_string(matched->first) + " " + fmt("%.2f", matched_steps) + " steps, " +
              fmt("%.1f", matched->second) + " spikes/episode; ratio " + fmt("%.2f", ratio) + " (min 3)"};
}

CriterionResult latency(const Options& o, const LearningData& d) {
  std::vector<double> lat;
  for (const auto& r : d.t8) lat.push_back(r.metrics.tests.back().mean_decision_latency);
  const auto m = mean_se(lat);
  const double limit = o.profile.encoder.horizon / 2.0;
  const double worst = *std::max_element(lat.begin(), lat.end());
  return {7, "converged decisions need less than half the window", m.mean < limit,
          "mean decision latency " + fmt("%.3f", m.mean) + " (worst seed " + fmt("%.3f", worst) + ", limit T/2=" +
              fmt("%.1f", limit) + ")"};
}

CriterionResult sarsa_sanity(const Options& o, const LearningData& d) {
  const EncoderConfig enc = encoder(o.profile, o.profile.encoder.horizon);
  int optimal = 0;
  int argmax_ok = 0;
  const auto cells = all_cells(o.profile.grid);
  std::ostringstream greedy;
  for (std::size_t k = 0; k < d.sarsa.size(); ++k) {
    Rng rng(derive_seed(o.profile.seeds[k], 300));
    const auto st = greedy_episode(d.sarsa[k].net, o.profile.grid, enc, o.profile.train.max_episode_steps, rng);
    greedy << ' ' << st.steps;
    if (st.reached_goal && st.steps == d.optimum) ++optimal;
    const IfSnn& snn = d.if_nets[k];
    int ok = 0;
    for (const Cell& c : cells) {
      const auto rates = rate_vector(enc, c);
      const auto pre = d.sarsa[k].net.pre_activations(rates);
      std::vector<double> drive(4);
      for (int j = 0; j < 4; ++j) {
        drive[j] = snn.bias_currents[j];
        for (int i = 0; i < snn.n_in; ++i) drive[j] += snn.weights[static_cast<std::size_t>(j * snn.n_in + i)] * rates[i];
      }
      ok += std::max_element(pre.begin(), pre.end()) - pre.begin() ==
            std::max_element(drive.begin(), drive.end()) - drive.begin();
    }
    if (ok == static_cast<int>(cells.size())) ++argmax_ok;
  }
  const int n = static_cast<int>(d.sarsa.size());
  return {8, "SARSA baseline reaches the optimum and conversion keeps argmax", optimal == n && argmax_ok == n,
          "greedy steps per seed" + greedy.str() + " (optimum " + std::to_string(d.optimum) + "), argmax preserved on all " +
              std::to_string(cells.size()) + " states for " + std::to_string(argmax_ok) + "/" + std::to_string(n) + " seeds"};
}

CriterionResult determinism(const Options& o) {
  std::vector<std::string> outputs;
  std::size_t rows = 0;
  for (Scenario s : {Scenario::Convergence, Scenario::HorizonSweep}) {
    ExperimentConfig c = default_config(s);
    c.methods = {Method::FtsSnn, Method::AnnPg, Method::SarsaIf};
    c.seeds = {o.profile.seeds.front(), o.profile.seeds.front() + 1};
    c.train = o.profile.train;
    c.train.epochs = 2;
    c.train.episodes_per_epoch = 50;
    c.train.test_episodes = 20;
    c.train.max_episode_steps = 200;
    c.sarsa.episodes = 100;
    c.sarsa_episodes_set = true;
    c.sarsa.max_episode_steps = 200;
    c.sweep.horizons = {4, 8};
    c.sweep.if_horizons = {16};
    std::string first;
    for (int workers : {1, 2}) {
      for (int rep = 0; rep < 2; ++rep) {
        c.workers = workers;
        const auto r = run_scenario(c);
        std::ostringstream out;
        write_csv(out, r);
        if (first.empty()) {
          first = out.str();
          rows += r.size();
        } else if (out.str() != first) {
          return {9, "repeated runs give byte-identical CSV", false,
                  std::string(scenario_name(s)) + " differed (workers=" + std::to_string(workers) + ")"};
        }
      }
    }
  }
  return {9, "repeated runs give byte-identical CSV", true,
          "convergence and horizon-sweep, 4 runs each (1 and 2 workers), " + std::to_string(rows) + " rows identical"};
}

CriterionResult environment_checks() {
  Rng rng(derive_seed(110, 1));
  int transitions = 0, failures = 0, grids = 0;
  auto check_grid = [&](const GridSpec& g) {
    for (const Cell& c : all_cells(g))
      for (Action a : kAllActions) {
        const auto out = step(g, c, a);
        ++transitions;
        const bool ok = g.contains(out.next) && out.done == (out.next == g.goal) && (out.reward > 0) == out.done;
        failures += !ok;
      }
    failures += shortest_path_length(g) != oracle::dp_distance(g);
    ++grids;
  };
  check_grid(GridSpec{});
  for (int n = 0; n < 1000; ++n) check_grid(oracle::random_grid(rng, 8, 8, 3));
  const bool canonical = shortest_path_length(GridSpec{}) == 15;
  return {10, "environment bounds, rewards and BFS-vs-DP", failures == 0 && canonical,
          std::to_string(grids) + " grids, " + std::to_string(transitions) + " transitions, " + std::to_string(failures) +
              " violations; default optimum " + std::to_string(shortest_path_length(GridSpec{}).value_or(-1))};
}

LearningData learn(const Options& o) {
  const ExperimentConfig& p = o.profile;
  LearningData d;
  d.optimum = shortest_path_length(p.grid).value();
  const std::size_t n = p.seeds.size();
  d.t8.resize(n);
  d.t2.resize(n);
  d.sarsa.resize(n, SarsaResult{DensePolicyNet(1, 1, OutputMode::Relu), {}});
  d.if_nets.resize(n);
  const BasisMode basis = p.policy.resolved_basis();
  // 3n independent jobs: T=8 full budget, T=2 first 2000 episodes, SARSA.
  parallel_for(3 * n, o.workers, [&](std::size_t job) {
    const std::size_t k = job % n;
    const std::uint64_t seed = p.seeds[k];
    if (job < n) {
      d.t8[k].metrics = train(p.grid, encoder(p, p.encoder.horizon), train_cfg(p, seed), p.policy.tau_s, p.policy.k_s,
                              basis).metrics;
    } else if (job < 2 * n) {
      TrainConfig t = train_cfg(p, seed);
      t.epochs = 2;
      t.episodes_per_epoch = 1000;
      t.test_episodes = 0;
      d.t2[k].metrics = train(p.grid, encoder(p, 2), t, p.policy.tau_s, p.policy.k_s, basis).metrics;
    } else {
      SarsaConfig s = p.sarsa;
      s.seed = seed;
      const EncoderConfig enc = encoder(p, p.encoder.horizon);
      d.sarsa[k] = sarsa_train(p.grid, enc, s);
      d.if_nets[k] = convert_to_if(d.sarsa[k].net, p.grid, enc);
    }
  });
  return d;
}

}  // namespace

ExperimentConfig default_profile() {
  ExperimentConfig c = default_config(Scenario::Acceptance);
  c.seeds = {1, 2, 3, 4, 5};
  c.encoder.window = 1;
  c.encoder.horizon = 8;
  c.policy.tau_s = 4;
  c.policy.k_s = 4;
  c.train.gamma = 0.9;
  c.train.eta0 = 0.2;
  c.train.schedule_k = 0.001;
  c.train.epochs = 5;
  c.train.episodes_per_epoch = 1000;
  c.train.test_episodes = 200;
  c.train.max_episode_steps = 1000;
  c.sarsa.gamma = 0.95;
  c.sarsa.episodes = 5000;
  c.sarsa_episodes_set = true;
  c.sarsa.max_episode_steps = 1000;
  return c;
}

Options default_options() {
  Options o;
  o.profile = default_profile();
  return o;
}

std::vector<CriterionResult> run_all(const Options& options, const std::function<void(const CriterionResult&)>& report) {
  options.profile.validate();
  std::vector<CriterionResult> results;
  auto add = [&](CriterionResult r) {
    if (report) report(r);
    results.push_back(std::move(r));
  };
  auto guarded = [&](int id, const char* name, auto&& f) {
    try {
      add(f());
    } catch (const std::exception& e) {
      add({id, name, false, std::string("error: ") + e.what()});
    }
  };
  guarded(1, "distribution matches brute-force enumeration", distribution_oracle);
  guarded(2, "gradient matches central finite differences", gradient_oracle);
  guarded(3, "sampler frequencies match exact choice probabilities", sampler_consistency);
  guarded(10, "environment bounds, rewards and BFS-vs-DP", environment_checks);

  std::optional<LearningData> data;
  std::string learn_error;
  try {
    data = learn(options);
  } catch (const std::exception& e) {
    learn_error = std::string("error: ") + e.what();
  }
  auto with_data = [&](int id, const char* name, auto&& f) {
    if (!data) return add({id, name, false, learn_error});
    guarded(id, name, [&] { return f(*data); });
  };
  with_data(4, "fts-snn converges near the optimum (T=8)", [&](const LearningData& d) { return convergence(options, d); });
  with_data(5, "learning is faster for T=8 than T=2", [&](const LearningData& d) { return horizon_trend(d); });
  with_data(6, "IF network spends more spikes at matched performance",
            [&](const LearningData& d) { return energy(options, d); });
  with_data(7, "converged decisions need less than half the window",
            [&](const LearningData& d) { return latency(options, d); });
  with_data(8, "SARSA baseline reaches the optimum and conversion keeps argmax",
            [&](const LearningData& d) { return sarsa_sanity(options, d); });
  guarded(9, "repeated runs give byte-identical CSV", [&] { return determinism(options); });

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return results;
}

std::string format_line(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ": " + r.detail;
}

}  // namespace spikerl::acceptance
