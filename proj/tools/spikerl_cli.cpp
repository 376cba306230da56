// Command-line front end: train, eval, sweep, accept.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "acceptance.hpp"
#include "spikerl/checkpoint.hpp"
#include "spikerl/config.hpp"
#include "spikerl/harness.hpp"
#include "spikerl/kernels.hpp"

namespace fs = std::filesystem;
using namespace spikerl;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool desk = false;
  bool full = false;
  std::vector<std::string> methods;
  int workers = -1;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "experiment config (YAML)")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "replicate seed (replaces the config's seed list)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  auto* desk = cmd->add_flag("--desk", c.desk, "5 epochs x 1000 episodes, 200 test episodes");
  auto* full = cmd->add_flag("--full", c.full, "25 epochs x 1000 episodes, 500 test episodes");
  desk->excludes(full);
  cmd->add_option("--method", c.methods, "fts-snn, ann-pg or sarsa-if (repeatable)");
  cmd->add_option("--workers", c.workers, "worker threads (0 = hardware threads)");
}

ExperimentConfig resolve(const Common& c, Scenario fallback) {
  ExperimentConfig cfg = c.config.empty() ? default_config(fallback) : load_config(c.config);
  if (c.desk) apply_budget(cfg, Budget::Desk);
  if (c.full) apply_budget(cfg, Budget::Full);
  if (c.seed) cfg.seeds = {*c.seed};
  if (!c.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : c.methods) cfg.methods.push_back(parse_method(m));
  }
  if (c.workers >= 0) cfg.workers = c.workers;
  cfg.validate();
  return cfg;
}

fs::path prepare(const std::string& out) {
  fs::create_directories(out);
  return out;
}

int cmd_train(const Common& c) {
  const ExperimentConfig cfg = resolve(c, Scenario::Convergence);
  const fs::path dir = prepare(c.out);
  std::vector<MetricsRow> rows;
  const std::string label(scenario_name(cfg.scenario));
  for (auto seed : cfg.seeds) {
    TrainConfig t = cfg.train;
    t.seed = seed;
    const std::string tag = "seed" + std::to_string(seed);
    for (Method m : cfg.methods) {
      const std::string name(method_name(m));
      if (m == Method::FtsSnn) {
        const auto r = train(cfg.grid, cfg.encoder, t, cfg.policy.tau_s, cfg.policy.k_s, cfg.policy.resolved_basis());
        save_checkpoint_file(dir / (name + "-" + tag + ".ckpt"), r.policy);
        for (const auto& e : r.metrics.training) rows.push_back(row_from_episode(label, name, seed, e));
        const auto& last = r.metrics.tests.back();
        std::cout << name << " seed " << seed << ": test steps " << last.mean_steps << ", goal rate "
                  << last.goal_rate << ", spikes/episode " << last.mean_total_spikes() << '\n';
      } else if (m == Method::AnnPg) {
        const auto r = train_ann_pg(cfg.grid, cfg.encoder, t);
        save_checkpoint_file(dir / (name + "-" + tag + ".ckpt"), r.net);
        for (const auto& e : r.metrics.training) rows.push_back(row_from_episode(label, name, seed, e));
        const auto& last = r.metrics.tests.back();
        std::cout << name << " seed " << seed << ": test steps " << last.mean_steps << ", goal rate "
                  << last.goal_rate << '\n';
      } else {
        SarsaConfig s = cfg.sarsa;
        s.seed = seed;
        const auto r = sarsa_train(cfg.grid, cfg.encoder, s);
        save_checkpoint_file(dir / ("sarsa-" + tag + ".ckpt"), r.net);
        save_checkpoint_file(dir / (name + "-" + tag + ".ckpt"), convert_to_if(r.net, cfg.grid, cfg.encoder));
        long n = 0;
        for (const auto& st : r.episodes) rows.push_back(row_from_episode(label, name, seed, {1, ++n, 0.0, st}));
        Rng rng(derive_seed(seed, 300));
        const auto g = greedy_episode(r.net, cfg.grid, cfg.encoder, cfg.sarsa.max_episode_steps, rng);
        std::cout << name << " seed " << seed << ": greedy value-net steps " << g.steps << '\n';
      }
    }
  }
  write_csv(dir / "train_metrics.csv", rows);
  std::cout << "wrote " << (dir / "train_metrics.csv").string() << '\n';
  return 0;
}

int cmd_eval(const Common& c, const std::string& checkpoint, int episodes, int if_horizon) {
  const ExperimentConfig cfg = resolve(c, Scenario::Convergence);
  const fs::path dir = prepare(c.out);
  const std::uint64_t seed = cfg.seeds.front();
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(Stream::Test)));
  const int n = episodes > 0 ? episodes : cfg.train.test_episodes;
  const std::string kind = peek_checkpoint_kind(checkpoint);
  TestSummary ts;
  std::string method;
  if (kind == kGlmMagic) {
    const GlmPolicy p = load_glm_checkpoint_file(checkpoint);
    EncoderConfig enc = cfg.encoder;
    enc.horizon = p.horizon();
    ts = evaluate_policy(p, cfg.grid, enc, cfg.train, n, rng);
    method = method_name(Method::FtsSnn);
  } else if (kind == kIfMagic) {
    const IfSnn snn = load_if_checkpoint_file(checkpoint);
    const int t_if = if_horizon > 0 ? if_horizon
                     : cfg.sweep.if_horizons.empty() ? 10 * cfg.encoder.horizon
                                                     : cfg.sweep.if_horizons.front();
    ts = evaluate_if(snn, cfg.grid, cfg.encoder, t_if, n, cfg.train.max_episode_steps, rng);
    method = method_name(Method::SarsaIf);
  } else if (kind == kAnnMagic) {
    const DensePolicyNet net = load_ann_checkpoint_file(checkpoint);
    std::vector<EpisodeStats> stats;
    for (int e = 0; e < n; ++e) {
      if (net.mode() == OutputMode::Relu) {
        stats.push_back(greedy_episode(net, cfg.grid, cfg.encoder, cfg.train.max_episode_steps, rng));
      } else {
        stats.push_back(episode_stats(rollout(cfg.grid, cfg.train.max_episode_steps, [&](Cell s) {
          Decision d;
          d.action = ann_pg_act(net, rate_vector(cfg.encoder, s), rng);
          return d;
        })));
      }
    }
    ts = summarize_tests(0, stats);
    method = net.mode() == OutputMode::Relu ? "sarsa" : std::string(method_name(Method::AnnPg));
  } else {
    throw CheckpointError("unrecognised checkpoint: " + kind);
  }
  const MetricsRow row = row_from_test("eval", method, seed, ts);
  write_csv(dir / "eval.csv", {row});
  std::cout << method << ": " << n << " episodes, mean steps " << ts.mean_steps << ", goal rate " << ts.goal_rate
            << ", spikes/episode " << ts.mean_total_spikes() << ", decision latency " << ts.mean_decision_latency
            << '\n';
  return 0;
}

int cmd_sweep(const Common& c) {
  const ExperimentConfig cfg = resolve(c, Scenario::Convergence);
  const fs::path dir = prepare(c.out);
  const auto rows = run_scenario(cfg);
  write_csv(dir / "metrics.csv", rows);
  std::ofstream summary(dir / "summary.csv");
  if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
  const auto agg = summarize(rows);
  write_summary_csv(summary, agg);
  write_summary_csv(std::cout, agg);
  std::cout << "wrote " << rows.size() << " rows to " << (dir / "metrics.csv").string() << '\n';
  return 0;
}

int cmd_accept(const Common& c) {
  acceptance::Options o = acceptance::default_options();
  if (!c.config.empty()) o.profile = load_config(c.config);
  if (c.desk) apply_budget(o.profile, Budget::Desk);
  if (c.full) apply_budget(o.profile, Budget::Full);
  if (c.seed) {
    const auto n = o.profile.seeds.size();
    o.profile.seeds.clear();
    for (std::size_t k = 0; k < n; ++k) o.profile.seeds.push_back(*c.seed + k);
  }
  if (c.workers >= 0) o.workers = c.workers;
  if (!o.profile.sweep.if_horizons.empty()) o.if_horizons = o.profile.sweep.if_horizons;
  const auto results = acceptance::run_all(o);
  const fs::path dir = prepare(c.out);
  std::ofstream report(dir / "acceptance.txt");
  int failed = 0;
  for (const auto& r : results) {
    const std::string line = acceptance::format_line(r);
    std::cout << line << '\n';
    report << line << '\n';
    failed += !r.pass;
  }
  std::cout << (failed ? "FAILED " : "PASSED ") << results.size() - static_cast<std::size_t>(failed) << "/"
            << results.size() << " criteria\n";
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking first-to-spike policy-gradient experiments on the windy grid world"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--isa", isa, "force kernel variant: scalar or avx2")->check(CLI::IsMember({"scalar", "avx2"}));

  Common train_opts, eval_opts, sweep_opts, accept_opts;
  auto* train_cmd = app.add_subcommand("train", "train models and write checkpoints plus per-episode metrics");
  add_common(train_cmd, train_opts, true);

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved checkpoint");
  add_common(eval_cmd, eval_opts, false);
  std::string checkpoint;
  int episodes = 0;
  int if_horizon = 0;
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", episodes, "test episodes (default: train.test_episodes)");
  eval_cmd->add_option("--if-horizon", if_horizon, "IF presentation length");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario and write metrics.csv and summary.csv");
  add_common(sweep_cmd, sweep_opts, true);

  auto* accept_cmd = app.add_subcommand("accept", "run the acceptance criteria");
  add_common(accept_cmd, accept_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (isa == "scalar") kernels::select(kernels::Isa::Scalar);
    if (isa == "avx2") kernels::select(kernels::Isa::Avx2);
    if (*train_cmd) return cmd_train(train_opts);
    if (*eval_cmd) return cmd_eval(eval_opts, checkpoint, episodes, if_horizon);
    if (*sweep_cmd) return cmd_sweep(sweep_opts);
    if (*accept_cmd) return cmd_accept(accept_opts);
  } catch (const std::exception& e) {
    std::cerr << "spikerl: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
