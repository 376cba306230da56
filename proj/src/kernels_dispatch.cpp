#include <atomic>
#include <stdexcept>
#include <string>

#include "spikerl/kernels.hpp"

namespace spikerl::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, &detail::dot_scalar, &detail::axpy_scalar};
#if defined(SPIKERL_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, &detail::dot_avx2, &detail::axpy_avx2};
#endif

bool cpu_has_avx2() {
#if defined(SPIKERL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_table() {
  if (const KernelTable* t = avx2_table()) return t;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{best_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(SPIKERL_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

bool available(Isa isa) { return isa == Isa::Scalar || avx2_table() != nullptr; }

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (!available(isa)) throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
  current().store(isa == Isa::Avx2 ? avx2_table() : &kScalar, std::memory_order_relaxed);
}

}  // namespace spikerl::kernels
