#include "spikerl/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spikerl {

std::string_view basis_mode_name(BasisMode mode) {
  return mode == BasisMode::Identity ? "identity" : "raised-cosine";
}

BasisMode parse_basis_mode(std::string_view name) {
  if (name == "identity") return BasisMode::Identity;
  if (name == "raised-cosine") return BasisMode::RaisedCosine;
  throw std::invalid_argument("unknown basis mode '" + std::string(name) + "'");
}

BasisMatrix BasisMatrix::raised_cosine(int tau_s, int k_s) {
  if (tau_s < 1 || k_s < 1) throw std::invalid_argument("basis: tau_s and k_s must be positive");
  if (k_s > tau_s) throw std::invalid_argument("basis: k_s must not exceed tau_s");
  BasisMatrix b(tau_s, k_s, BasisMode::RaisedCosine);
  const double width = static_cast<double>(tau_s - 1) / static_cast<double>(std::max(k_s - 1, 1));
  for (int k = 0; k < k_s; ++k) {
    const double center = 1.0 + width * k;
    for (int lag = 1; lag <= tau_s; ++lag) {
      const double dist = static_cast<double>(lag) - center;
      double v = 0.0;
      if (width == 0.0) {
        v = dist == 0.0 ? 1.0 : 0.0;
      } else if (std::abs(dist) <= width) {
        v = 0.5 * (1.0 + std::cos(std::numbers::pi * dist / width));
      }
      b.values_[static_cast<std::size_t>((lag - 1) * k_s + k)] = v;
    }
  }
  return b;
}

BasisMatrix BasisMatrix::identity(int n) {
  if (n < 1) throw std::invalid_argument("basis: size must be positive");
  BasisMatrix b(n, n, BasisMode::Identity);
  for (int i = 0; i < n; ++i) b.values_[static_cast<std::size_t>(i * n + i)] = 1.0;
  return b;
}

BasisMatrix BasisMatrix::make(BasisMode mode, int tau_s, int k_s) {
  if (mode == BasisMode::Identity) {
    if (k_s != tau_s) throw std::invalid_argument("basis: identity mode requires k_s == tau_s");
    return identity(tau_s);
  }
  return raised_cosine(tau_s, k_s);
}

}  // namespace spikerl
