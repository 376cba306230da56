#include "spikerl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "spikerl/format.hpp"

namespace spikerl {

void MetricsRow::check() const {
  if (steps_to_goal < 0 || reached_goal < 0 || reached_goal > 1 || input_spikes < 0 || output_spikes < 0 ||
      decision_latency_mean < 0 || epoch < 0 || episode < 0)
    throw std::logic_error("metrics row " + scenario + "/" + method + ": negative count");
  if (total_spikes != input_spikes + output_spikes)
    throw std::logic_error("metrics row " + scenario + "/" + method + ": total_spikes != input + output");
}

MetricsRow row_from_test(std::string scenario, std::string method, std::uint64_t seed, const TestSummary& t) {
  MetricsRow r;
  r.scenario = std::move(scenario);
  r.method = std::move(method);
  r.seed = seed;
  r.epoch = t.epoch;
  r.episode = 0;
  r.steps_to_goal = t.mean_steps;
  r.reached_goal = t.goal_rate;
  r.input_spikes = t.mean_input_spikes;
  r.output_spikes = t.mean_output_spikes;
  r.total_spikes = r.input_spikes + r.output_spikes;
  r.decision_latency_mean = t.mean_decision_latency;
  return r;
}

MetricsRow row_from_episode(std::string scenario, std::string method, std::uint64_t seed, const EpisodeMetric& m) {
  MetricsRow r;
  r.scenario = std::move(scenario);
  r.method = std::move(method);
  r.seed = seed;
  r.epoch = m.epoch;
  r.episode = m.episode;
  r.steps_to_goal = m.stats.steps;
  r.reached_goal = m.stats.reached_goal ? 1.0 : 0.0;
  r.input_spikes = static_cast<double>(m.stats.input_spikes);
  r.output_spikes = static_cast<double>(m.stats.output_spikes);
  r.total_spikes = static_cast<double>(m.stats.total_spikes());
  r.decision_latency_mean = m.stats.decision_latency_mean;
  r.eta = m.eta;
  return r;
}

namespace {

struct RunCell {
  std::string label;
  Method method;
  std::uint64_t seed;
  std::function<std::vector<MetricsRow>()> run;
};

std::string label(const ExperimentConfig& cfg, std::initializer_list<std::pair<const char*, int>> coords) {
  std::string s(scenario_name(cfg.scenario));
  for (const auto& [k, v] : coords) s += ":" + std::string(k) + "=" + std::to_string(v);
  return s;
}

EncoderConfig encoder_for(const ExperimentConfig& cfg, int window, int horizon) {
  EncoderConfig enc = cfg.encoder;
  enc.window = window;
  enc.horizon = horizon;
  return enc;
}

TrainConfig train_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.seed = seed;
  return t;
}

GlmTrainResult train_fts(const ExperimentConfig& cfg, const EncoderConfig& enc, std::uint64_t seed) {
  return train(cfg.grid, enc, train_for(cfg, seed), cfg.policy.tau_s, cfg.policy.k_s, cfg.policy.resolved_basis());
}

std::vector<MetricsRow> episode_rows(const std::string& lbl, Method m, std::uint64_t seed, const MetricsSeries& ms) {
  std::vector<MetricsRow> rows;
  rows.reserve(ms.training.size());
  for (const auto& e : ms.training) rows.push_back(row_from_episode(lbl, std::string(method_name(m)), seed, e));
  return rows;
}

MetricsRow final_test_row(const std::string& lbl, Method m, std::uint64_t seed, const MetricsSeries& ms) {
  return row_from_test(lbl, std::string(method_name(m)), seed, ms.tests.back());
}

// SARSA training rows (one per episode, epoch 1) for the convergence view.
std::vector<MetricsRow> sarsa_rows(const std::string& lbl, std::uint64_t seed, const SarsaResult& res) {
  std::vector<MetricsRow> rows;
  long n = 0;
  for (const auto& st : res.episodes)
    rows.push_back(row_from_episode(lbl, std::string(method_name(Method::SarsaIf)), seed, {1, ++n, 0.0, st}));
  return rows;
}

SarsaConfig sarsa_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  SarsaConfig s = cfg.sarsa;
  s.seed = seed;
  return s;
}

// Trains SARSA, converts, and evaluates the IF network at each presentation length.
std::vector<MetricsRow> sarsa_if_rows(const ExperimentConfig& cfg, const EncoderConfig& enc, std::uint64_t seed,
                                      const std::function<std::string(int)>& label_for) {
  const SarsaResult res = sarsa_train(cfg.grid, enc, sarsa_for(cfg, seed));
  const IfSnn snn = convert_to_if(res.net, cfg.grid, enc);
  std::vector<MetricsRow> rows;
  for (int t_if : cfg.sweep.if_horizons) {
    Rng rng(derive_seed(seed, 100 + static_cast<std::uint64_t>(t_if)));
    TestSummary ts = evaluate_if(snn, cfg.grid, enc, t_if, cfg.train.test_episodes, cfg.train.max_episode_steps, rng);
    ts.epoch = 1;
    rows.push_back(row_from_test(label_for(t_if), std::string(method_name(Method::SarsaIf)), seed, ts));
  }
  return rows;
}

std::vector<RunCell> plan(const ExperimentConfig& cfg) {
  std::vector<RunCell> cells;
  auto has = [&](Method m) { return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end(); };
  const int W0 = cfg.encoder.window;

  switch (cfg.scenario) {
    case Scenario::Convergence:
    case Scenario::SpikeFrequency: {
      for (Method m : cfg.methods) {
        if (m == Method::FtsSnn) {
          for (int T : cfg.horizons())
            for (auto seed : cfg.seeds) {
              const std::string lbl = label(cfg, {{"T", T}});
              cells.push_back({lbl, m, seed, [&cfg, lbl, T, W0, seed, m] {
                                 return episode_rows(lbl, m, seed, train_fts(cfg, encoder_for(cfg, W0, T), seed).metrics);
                               }});
            }
        } else if (m == Method::AnnPg) {
          for (auto seed : cfg.seeds) {
            const std::string lbl = label(cfg, {});
            cells.push_back({lbl, m, seed, [&cfg, lbl, W0, seed, m] {
                               const auto enc = encoder_for(cfg, W0, cfg.encoder.horizon);
                               return episode_rows(lbl, m, seed, train_ann_pg(cfg.grid, enc, train_for(cfg, seed)).metrics);
                             }});
          }
        } else {
          for (auto seed : cfg.seeds) {
            const std::string lbl = label(cfg, {});
            cells.push_back({lbl, m, seed, [&cfg, lbl, W0, seed] {
                               const auto enc = encoder_for(cfg, W0, cfg.encoder.horizon);
                               return sarsa_rows(lbl, seed, sarsa_train(cfg.grid, enc, sarsa_for(cfg, seed)));
                             }});
          }
        }
      }
      break;
    }
    case Scenario::WindowSweep:
    case Scenario::HorizonSweep:
    case Scenario::Acceptance: {
      const bool window_sweep = cfg.scenario == Scenario::WindowSweep;
      const std::vector<int> windows = window_sweep ? cfg.windows() : std::vector<int>{W0};
      for (int W : windows) {
        const int n_x = encoder_for(cfg, W, cfg.encoder.horizon).n_inputs();
        auto coords = [&cfg, window_sweep, W, n_x](const char* key, int value) {
          return window_sweep ? label(cfg, {{"W", W}, {"Nx", n_x}, {key, value}}) : label(cfg, {{key, value}});
        };
        if (has(Method::FtsSnn))
          for (int T : cfg.horizons())
            for (auto seed : cfg.seeds) {
              const std::string lbl = coords("T", T);
              const bool all_epochs = cfg.scenario == Scenario::Acceptance;
              cells.push_back({lbl, Method::FtsSnn, seed, [&cfg, lbl, W, T, seed, all_epochs] {
                                 const auto res = train_fts(cfg, encoder_for(cfg, W, T), seed);
                                 if (!all_epochs) return std::vector<MetricsRow>{
                                     final_test_row(lbl, Method::FtsSnn, seed, res.metrics)};
                                 std::vector<MetricsRow> rows;
                                 for (const auto& t : res.metrics.tests)
                                   rows.push_back(row_from_test(lbl, "fts-snn", seed, t));
                                 return rows;
                               }});
            }
        if (has(Method::AnnPg))
          for (auto seed : cfg.seeds) {
            const std::string lbl = window_sweep ? label(cfg, {{"W", W}, {"Nx", n_x}}) : label(cfg, {});
            cells.push_back({lbl, Method::AnnPg, seed, [&cfg, lbl, W, seed] {
                               const auto enc = encoder_for(cfg, W, cfg.encoder.horizon);
                               const auto res = train_ann_pg(cfg.grid, enc, train_for(cfg, seed));
                               return std::vector<MetricsRow>{final_test_row(lbl, Method::AnnPg, seed, res.metrics)};
                             }});
          }
        if (has(Method::SarsaIf))
          for (auto seed : cfg.seeds) {
            const std::string lbl = window_sweep ? label(cfg, {{"W", W}, {"Nx", n_x}}) : label(cfg, {});
            cells.push_back({lbl, Method::SarsaIf, seed, [&cfg, W, seed, coords] {
                               return sarsa_if_rows(cfg, encoder_for(cfg, W, cfg.encoder.horizon), seed,
                                                    [&coords](int t_if) { return coords("Tif", t_if); });
                             }});
          }
      }
      break;
    }
  }
  return cells;
}

}  // namespace

std::vector<MetricsRow> run_scenario(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<RunCell> cells = plan(cfg);
  std::vector<std::vector<MetricsRow>> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());

  unsigned workers = cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : std::thread::hardware_concurrency();
  workers = std::clamp(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cells.size();) {
      try {
        results[c] = cells[c].run();
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::vector<MetricsRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (errors[c]) {
      try {
        std::rethrow_exception(errors[c]);
      } catch (const std::exception& e) {
        throw std::runtime_error("cell " + cells[c].label + " method=" + std::string(method_name(cells[c].method)) +
                                 " seed=" + std::to_string(cells[c].seed) + " failed: " + e.what());
      }
    }
    for (auto& r : results[c]) {
      r.check();
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.method << ',' << r.seed << ',' << r.epoch << ',' << r.episode << ','
        << format_double(r.steps_to_goal) << ',' << format_double(r.reached_goal) << ','
        << format_double(r.input_spikes) << ',' << format_double(r.output_spikes) << ','
        << format_double(r.total_spikes) << ',' << format_double(r.decision_latency_mean) << ','
        << format_double(r.eta) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, rows);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<MetricsRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("read_csv: unexpected header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    if (f.size() != 12) throw std::runtime_error("read_csv: expected 12 fields in '" + line + "'");
    MetricsRow r;
    r.scenario = f[0];
    r.method = f[1];
    r.seed = std::stoull(f[2]);
    r.epoch = std::stoi(f[3]);
    r.episode = std::stol(f[4]);
    r.steps_to_goal = parse_double(f[5]);
    r.reached_goal = parse_double(f[6]);
    r.input_spikes = parse_double(f[7]);
    r.output_spikes = parse_double(f[8]);
    r.total_spikes = parse_double(f[9]);
    r.decision_latency_mean = parse_double(f[10]);
    r.eta = parse_double(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows) {
  struct Acc {
    SummaryRow row;
    std::vector<double> steps, spikes;
  };
  std::vector<Acc> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Acc& a) { return a.row.scenario == r.scenario && a.row.method == r.method; });
    if (it == groups.end()) {
      groups.push_back({{r.scenario, r.method}, {}, {}});
      it = std::prev(groups.end());
    }
    it->steps.push_back(r.steps_to_goal);
    it->spikes.push_back(r.total_spikes);
  }
  auto mean_se = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() < 2) return std::pair{m, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::pair{m, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
  };
  std::vector<SummaryRow> out;
  for (auto& g : groups) {
    g.row.count = static_cast<int>(g.steps.size());
    std::tie(g.row.steps_mean, g.row.steps_stderr) = mean_se(g.steps);
    std::tie(g.row.total_spikes_mean, g.row.total_spikes_stderr) = mean_se(g.spikes);
    out.push_back(g.row);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "scenario,method,count,steps_mean,steps_stderr,total_spikes_mean,total_spikes_stderr\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.method << ',' << r.count << ',' << format_double(r.steps_mean) << ','
        << format_double(r.steps_stderr) << ',' << format_double(r.total_spikes_mean) << ','
        << format_double(r.total_spikes_stderr) << '\n';
}

}  // namespace spikerl
