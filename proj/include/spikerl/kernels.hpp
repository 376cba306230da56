#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision inner loops used by the policy, the baselines and
// the update rule. Each kernel has a scalar reference and, on x86-64, an
// AVX2/FMA variant; the variant is chosen once at runtime from CPUID.
namespace spikerl::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the build has no AVX2 variant or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

bool available(Isa isa);
// Best available table unless overridden with select().
const KernelTable& active();
// Throws std::invalid_argument when the requested ISA is unavailable.
void select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
#if defined(SPIKERL_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif
}  // namespace detail

}  // namespace spikerl::kernels
