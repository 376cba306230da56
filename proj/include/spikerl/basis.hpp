#pragma once

#include <string_view>
#include <vector>

namespace spikerl {

enum class BasisMode { RaisedCosine, Identity };

std::string_view basis_mode_name(BasisMode mode);
// Accepts "raised-cosine" and "identity"; throws std::invalid_argument otherwise.
BasisMode parse_basis_mode(std::string_view name);

// tau_s x k_s matrix whose columns span the synaptic memory window. Row d
// (0-based) is the weight of the input sample d + 1 steps in the past.
class BasisMatrix {
 public:
  // Linearly spaced cosine bumps. Centers sit evenly on [1, tau_s] and
  // neighbouring bumps cross at half height.
  static BasisMatrix raised_cosine(int tau_s, int k_s);
  static BasisMatrix identity(int n);
  static BasisMatrix make(BasisMode mode, int tau_s, int k_s);

  int tau_s() const { return tau_s_; }
  int k_s() const { return k_s_; }
  BasisMode mode() const { return mode_; }

  double at(int lag_row, int k) const { return values_[static_cast<std::size_t>(lag_row * k_s_ + k)]; }
  const std::vector<double>& values() const { return values_; }

 private:
  BasisMatrix(int tau_s, int k_s, BasisMode mode)
      : tau_s_(tau_s), k_s_(k_s), mode_(mode), values_(static_cast<std::size_t>(tau_s * k_s), 0.0) {}

  int tau_s_;
  int k_s_;
  BasisMode mode_;
  std::vector<double> values_;
};

}  // namespace spikerl
