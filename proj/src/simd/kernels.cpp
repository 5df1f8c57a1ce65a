#include "elyte/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

namespace elyte::simd {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

namespace {

bool cpu_has_avx2() noexcept {
#if defined(ELYTE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::vector<const KernelTable*> detect() {
  std::vector<const KernelTable*> tables{&scalar::table()};
#if defined(ELYTE_HAVE_AVX2)
  if (cpu_has_avx2()) tables.push_back(&avx2::table());
#endif
#if defined(ELYTE_HAVE_NEON)
  tables.push_back(&neon::table());
#endif
  return tables;
}

const std::vector<const KernelTable*>& tables() {
  static const std::vector<const KernelTable*> t = detect();
  return t;
}

const KernelTable* initial() {
  const auto& t = tables();
  if (const char* env = std::getenv("ELYTE_SIMD"); env && std::string(env) == "scalar") return t.front();
  return t.back();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> c{initial()};
  return c;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

std::span<const KernelTable* const> available() noexcept { return tables(); }

bool force(Isa isa) noexcept {
  for (const KernelTable* t : tables()) {
    if (t->isa == isa) {
      current().store(t, std::memory_order_relaxed);
      return true;
    }
  }
  return false;
}

}  // namespace elyte::simd
