#pragma once

// Data-parallel reductions used by the recommender (cosine scores, k-means
// distances) and the metrics module. Each kernel has a scalar reference in
// elyte::simd::scalar and vector variants selected once at runtime.

#include <span>
#include <string_view>

namespace elyte::simd {

using cspan = std::span<const double>;

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(cspan a, cspan b);
  double (*sum)(cspan a);
  double (*sum_squares)(cspan a);
  double (*squared_distance)(cspan a, cspan b);
  double (*sum_abs_diff)(cspan a, cspan b);
  double (*sum_squared_diff)(cspan a, cspan b);
  // sum of |predicted - actual| / |actual|
  double (*sum_abs_relative_error)(cspan actual, cspan predicted);
  double (*sum_squared_deviation)(cspan a, double center);
  void (*axpy)(double alpha, cspan x, std::span<double> y);
};

namespace scalar {
const KernelTable& table() noexcept;
}
#if defined(ELYTE_HAVE_AVX2)
namespace avx2 {
const KernelTable& table() noexcept;
}
#endif
#if defined(ELYTE_HAVE_NEON)
namespace neon {
const KernelTable& table() noexcept;
}
#endif

/// Best table the running CPU supports. ELYTE_SIMD=scalar in the environment
/// pins the scalar reference.
const KernelTable& active() noexcept;

/// Every table compiled in and usable on this CPU, scalar first.
std::span<const KernelTable* const> available() noexcept;

/// Override the dispatch (tests, benchmarking). Returns false when the ISA is
/// not available here.
bool force(Isa isa) noexcept;

inline double dot(cspan a, cspan b) { return active().dot(a, b); }
inline double sum(cspan a) { return active().sum(a); }
inline double sum_squares(cspan a) { return active().sum_squares(a); }
inline double squared_distance(cspan a, cspan b) { return active().squared_distance(a, b); }
inline double sum_abs_diff(cspan a, cspan b) { return active().sum_abs_diff(a, b); }
inline double sum_squared_diff(cspan a, cspan b) { return active().sum_squared_diff(a, b); }
inline double sum_abs_relative_error(cspan actual, cspan predicted) {
  return active().sum_abs_relative_error(actual, predicted);
}
inline double sum_squared_deviation(cspan a, double center) { return active().sum_squared_deviation(a, center); }
inline void axpy(double alpha, cspan x, std::span<double> y) { active().axpy(alpha, x, y); }

}  // namespace elyte::simd
