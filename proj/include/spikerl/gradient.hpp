#pragma once

#include <vector>

namespace spikerl {

// Gradient with respect to a flat (weights, biases) parameter set. Layout
// matches the owning model.
struct GradientAccumulator {
  std::vector<double> d_weights;
  std::vector<double> d_biases;
};

}  // namespace spikerl
