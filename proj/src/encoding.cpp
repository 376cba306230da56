#include "spikerl/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace spikerl {

void EncoderConfig::validate() const {
  if (window < 1) throw std::invalid_argument("encoder.window: must be positive");
  if (rows < 1 || cols < 1) throw std::invalid_argument("encoder: grid dimensions must be positive");
  if (window > std::max(rows, cols)) throw std::invalid_argument("encoder.window: larger than the grid");
  if (!(p_min >= 0.0 && p_min <= 1.0)) throw std::invalid_argument("encoder.p_min: must lie in [0, 1]");
  if (!(p_max >= 0.0 && p_max <= 1.0)) throw std::invalid_argument("encoder.p_max: must lie in [0, 1]");
  if (p_max < p_min) throw std::invalid_argument("encoder.p_min, encoder.p_max: p_max must be >= p_min");
  if (horizon < 1) throw std::invalid_argument("encoder.horizon: must be positive");
}

int section_index(const EncoderConfig& cfg, Cell s) {
  const int block_row = (s.row - 1) / cfg.window;
  const int block_col = (s.col - 1) / cfg.window;
  return block_row * cfg.sections_across() + block_col + 1;
}

int within_index(const EncoderConfig& cfg, Cell s) {
  return ((s.row - 1) % cfg.window) * cfg.window + ((s.col - 1) % cfg.window) + 1;
}

double active_rate(const EncoderConfig& cfg, Cell s) {
  const int cells = cfg.window * cfg.window;
  if (cells == 1) return cfg.p_min;
  return cfg.p_min + (cfg.p_max - cfg.p_min) / static_cast<double>(cells - 1) *
                         static_cast<double>(within_index(cfg, s) - 1);
}

std::vector<double> rate_vector(const EncoderConfig& cfg, Cell s) {
  std::vector<double> rates(static_cast<std::size_t>(cfg.n_inputs()), 0.0);
  rates[static_cast<std::size_t>(section_index(cfg, s) - 1)] = active_rate(cfg, s);
  return rates;
}

int SpikeTrainBatch::count_through(int through) const {
  const int last = std::min(through, horizon_ - 1);
  int total = 0;
  for (int i = 0; i < n_inputs_; ++i)
    for (int t = 0; t <= last; ++t) total += at(i, t);
  return total;
}

SpikeTrainBatch encode(const EncoderConfig& cfg, Cell s, Rng& rng) { return encode(cfg, s, cfg.horizon, rng); }

SpikeTrainBatch encode(const EncoderConfig& cfg, Cell s, int horizon, Rng& rng) {
  SpikeTrainBatch batch(cfg.n_inputs(), horizon);
  const int active = section_index(cfg, s) - 1;
  const double p = active_rate(cfg, s);
  for (int t = 0; t < horizon; ++t) batch.set(active, t, rng.bernoulli(p));
  return batch;
}

}  // namespace spikerl
