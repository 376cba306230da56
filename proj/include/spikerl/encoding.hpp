#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikerl/gridworld.hpp"
#include "spikerl/rng.hpp"

namespace spikerl {

// Windowed rate code: the grid is tiled into W x W sections, one input neuron
// per section. Only the neuron of the agent's section is active, and its rate
// grows linearly with the position inside the section.
struct EncoderConfig {
  int window = 1;
  double p_min = 0.5;
  double p_max = 1.0;
  int horizon = 8;
  int rows = 7;
  int cols = 10;

  int sections_down() const { return (rows + window - 1) / window; }
  int sections_across() const { return (cols + window - 1) / window; }
  int n_inputs() const { return sections_down() * sections_across(); }

  void validate() const;
};

// 1-based section index, sections numbered left-to-right then top-to-bottom.
int section_index(const EncoderConfig& cfg, Cell s);
// 1-based position inside the section, same ordering, in 1..W^2.
int within_index(const EncoderConfig& cfg, Cell s);

// Spike probability of the active input neuron. With W = 1 this is p_min.
double active_rate(const EncoderConfig& cfg, Cell s);
std::vector<double> rate_vector(const EncoderConfig& cfg, Cell s);

// N_x x T binary matrix of input spikes for one decision. Time steps are
// 0-based: column t holds the spikes of SNN time tau = t + 1.
class SpikeTrainBatch {
 public:
  SpikeTrainBatch() = default;
  SpikeTrainBatch(int n_inputs, int horizon)
      : n_inputs_(n_inputs), horizon_(horizon), bits_(static_cast<std::size_t>(n_inputs * horizon), 0) {}

  int n_inputs() const { return n_inputs_; }
  int horizon() const { return horizon_; }

  std::uint8_t at(int input, int t) const { return bits_[offset(input, t)]; }
  void set(int input, int t, bool spike) { bits_[offset(input, t)] = spike ? 1 : 0; }

  std::span<const std::uint8_t> row(int input) const {
    return {bits_.data() + offset(input, 0), static_cast<std::size_t>(horizon_)};
  }

  // Spike bits at time steps 0..through (inclusive), summed over inputs.
  int count_through(int through) const;
  int count() const { return count_through(horizon_ - 1); }

  friend bool operator==(const SpikeTrainBatch&, const SpikeTrainBatch&) = default;

 private:
  std::size_t offset(int input, int t) const {
    return static_cast<std::size_t>(input) * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(t);
  }

  int n_inputs_ = 0;
  int horizon_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Fresh Bernoulli draw of every input bit. Draws are taken for the active row
// only; inactive rows have rate 0 and are always silent.
SpikeTrainBatch encode(const EncoderConfig& cfg, Cell s, Rng& rng);

// Same, with an explicit presentation length (used for the IF baseline).
SpikeTrainBatch encode(const EncoderConfig& cfg, Cell s, int horizon, Rng& rng);

}  // namespace spikerl
