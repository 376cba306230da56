#include "spikerl/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spikerl/format.hpp"

namespace spikerl {

namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void expect_magic(std::string_view magic) {
    std::string line;
    if (!std::getline(in_, line)) throw CheckpointError("checkpoint: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != magic)
      throw CheckpointError("checkpoint: expected header '" + std::string(magic) + "', found '" + line + "'");
  }

  std::string token(std::string_view what) {
    std::string t;
    if (!(in_ >> t)) throw CheckpointError("checkpoint: truncated while reading " + std::string(what));
    return t;
  }

  void keyword(std::string_view key) {
    const std::string t = token(key);
    if (t != key) throw CheckpointError("checkpoint: expected '" + std::string(key) + "', found '" + t + "'");
  }

  int integer(std::string_view key) {
    keyword(key);
    const std::string t = token(key);
    int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || v < 1)
      throw CheckpointError("checkpoint: bad value for " + std::string(key) + ": '" + t + "'");
    return v;
  }

  std::string word(std::string_view key) {
    keyword(key);
    return token(key);
  }

  std::vector<double> block(std::string_view key, std::size_t n) {
    keyword(key);
    std::vector<double> v(n);
    for (double& x : v) {
      const std::string t = token(key);
      try {
        x = parse_double(t);
      } catch (const std::invalid_argument& e) {
        throw CheckpointError("checkpoint: " + std::string(key) + ": " + e.what());
      }
    }
    return v;
  }

  void expect_end() {
    std::string extra;
    if (in_ >> extra) throw CheckpointError("checkpoint: trailing data '" + extra + "'");
  }

 private:
  std::istream& in_;
};

void write_block(std::ostream& out, std::string_view key, const std::vector<double>& values, std::size_t per_line) {
  out << key << '\n';
  for (std::size_t n = 0; n < values.size(); ++n) {
    out << format_double(values[n]);
    out << ((n + 1) % per_line == 0 || n + 1 == values.size() ? '\n' : ' ');
  }
}

}  // namespace

void save_checkpoint(std::ostream& out, const GlmPolicy& policy) {
  const auto& s = policy.shape();
  out << kGlmMagic << '\n'
      << "n_in " << s.n_in << '\n'
      << "n_out " << s.n_out << '\n'
      << "tau_s " << s.tau_s << '\n'
      << "k_s " << s.k_s << '\n'
      << "horizon " << s.horizon << '\n'
      << "basis " << basis_mode_name(s.basis) << '\n';
  std::vector<double> w;
  w.reserve(policy.weights().size());
  for (int i = 0; i < s.n_in; ++i)
    for (int j = 0; j < s.n_out; ++j)
      for (int k = 0; k < s.k_s; ++k) w.push_back(policy.weight(i, j, k));
  write_block(out, "weights", w, static_cast<std::size_t>(s.n_out * s.k_s));
  write_block(out, "biases", {policy.biases().begin(), policy.biases().end()}, static_cast<std::size_t>(s.n_out));
}

GlmPolicy load_glm_checkpoint(std::istream& in) {
  Reader r(in);
  r.expect_magic(kGlmMagic);
  PolicyShape s;
  s.n_in = r.integer("n_in");
  s.n_out = r.integer("n_out");
  s.tau_s = r.integer("tau_s");
  s.k_s = r.integer("k_s");
  s.horizon = r.integer("horizon");
  try {
    s.basis = parse_basis_mode(r.word("basis"));
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  GlmPolicy p(s);
  const auto w = r.block("weights", p.weights().size());
  std::size_t n = 0;
  for (int i = 0; i < s.n_in; ++i)
    for (int j = 0; j < s.n_out; ++j)
      for (int k = 0; k < s.k_s; ++k) p.weight(i, j, k) = w[n++];
  const auto b = r.block("biases", p.biases().size());
  std::copy(b.begin(), b.end(), p.biases().begin());
  r.expect_end();
  return p;
}

void save_checkpoint(std::ostream& out, const DensePolicyNet& net) {
  out << kAnnMagic << '\n'
      << "n_in " << net.n_in() << '\n'
      << "n_out " << net.n_out() << '\n'
      << "mode " << (net.mode() == OutputMode::Softmax ? "softmax" : "relu") << '\n';
  std::vector<double> w;
  for (int i = 0; i < net.n_in(); ++i)
    for (int j = 0; j < net.n_out(); ++j) w.push_back(net.weight(i, j));
  write_block(out, "weights", w, static_cast<std::size_t>(net.n_out()));
  write_block(out, "biases", {net.biases().begin(), net.biases().end()}, static_cast<std::size_t>(net.n_out()));
}

DensePolicyNet load_ann_checkpoint(std::istream& in) {
  Reader r(in);
  r.expect_magic(kAnnMagic);
  const int n_in = r.integer("n_in");
  const int n_out = r.integer("n_out");
  const std::string mode = r.word("mode");
  if (mode != "softmax" && mode != "relu") throw CheckpointError("checkpoint: unknown mode '" + mode + "'");
  DensePolicyNet net(n_in, n_out, mode == "softmax" ? OutputMode::Softmax : OutputMode::Relu);
  const auto w = r.block("weights", net.weights().size());
  std::size_t n = 0;
  for (int i = 0; i < n_in; ++i)
    for (int j = 0; j < n_out; ++j) net.weight(i, j) = w[n++];
  const auto b = r.block("biases", net.biases().size());
  std::copy(b.begin(), b.end(), net.biases().begin());
  r.expect_end();
  return net;
}

void save_checkpoint(std::ostream& out, const IfSnn& snn) {
  out << kIfMagic << '\n' << "n_in " << snn.n_in << '\n' << "n_out " << snn.n_out << '\n';
  std::vector<double> w;
  for (int i = 0; i < snn.n_in; ++i)
    for (int j = 0; j < snn.n_out; ++j) w.push_back(snn.weights[static_cast<std::size_t>(j * snn.n_in + i)]);
  write_block(out, "weights", w, static_cast<std::size_t>(snn.n_out));
  write_block(out, "bias_currents", snn.bias_currents, static_cast<std::size_t>(snn.n_out));
  write_block(out, "thresholds", snn.thresholds, static_cast<std::size_t>(snn.n_out));
}

IfSnn load_if_checkpoint(std::istream& in) {
  Reader r(in);
  r.expect_magic(kIfMagic);
  IfSnn snn;
  snn.n_in = r.integer("n_in");
  snn.n_out = r.integer("n_out");
  const auto w = r.block("weights", static_cast<std::size_t>(snn.n_in * snn.n_out));
  snn.weights.resize(w.size());
  std::size_t n = 0;
  for (int i = 0; i < snn.n_in; ++i)
    for (int j = 0; j < snn.n_out; ++j) snn.weights[static_cast<std::size_t>(j * snn.n_in + i)] = w[n++];
  snn.bias_currents = r.block("bias_currents", static_cast<std::size_t>(snn.n_out));
  snn.thresholds = r.block("thresholds", static_cast<std::size_t>(snn.n_out));
  r.expect_end();
  try {
    snn.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint: ") + e.what());
  }
  return snn;
}

std::string peek_checkpoint_kind(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

template <class Model>
void save_checkpoint_file(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  save_checkpoint(out, model);
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

template void save_checkpoint_file<GlmPolicy>(const std::filesystem::path&, const GlmPolicy&);
template void save_checkpoint_file<DensePolicyNet>(const std::filesystem::path&, const DensePolicyNet&);
template void save_checkpoint_file<IfSnn>(const std::filesystem::path&, const IfSnn&);

namespace {
template <class F>
auto load_file(const std::filesystem::path& path, F&& load) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return load(in);
}
}  // namespace

GlmPolicy load_glm_checkpoint_file(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in) { return load_glm_checkpoint(in); });
}
DensePolicyNet load_ann_checkpoint_file(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in) { return load_ann_checkpoint(in); });
}
IfSnn load_if_checkpoint_file(const std::filesystem::path& path) {
  return load_file(path, [](std::istream& in) { return load_if_checkpoint(in); });
}

}  // namespace spikerl
