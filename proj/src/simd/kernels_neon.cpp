// AArch64 only; NEON is part of the baseline ISA there, so no runtime probe.
#include "elyte/simd/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace elyte::simd::neon {

namespace {

constexpr std::size_t kLanes = 2;

double dot(cspan a, cspan b) {
  const std::size_t n = a.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = vfmaq_f64(acc, vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum(cspan a) {
  const std::size_t n = a.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = vaddq_f64(acc, vld1q_f64(a.data() + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double sum_squares(cspan a) { return dot(a, a); }

double squared_distance(cspan a, cspan b) {
  const std::size_t n = a.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_abs_diff(cspan a, cspan b) {
  const std::size_t n = a.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double sum_abs_relative_error(cspan actual, cspan predicted) {
  const std::size_t n = actual.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t y = vld1q_f64(actual.data() + i);
    const float64x2_t d = vabdq_f64(vld1q_f64(predicted.data() + i), y);
    acc = vaddq_f64(acc, vdivq_f64(d, vabsq_f64(y)));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(predicted[i] - actual[i]) / std::fabs(actual[i]);
  return s;
}

double sum_squared_deviation(cspan a, double center) {
  const std::size_t n = a.size();
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a.data() + i), c);
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - center;
    s += d * d;
  }
  return s;
}

void axpy(double alpha, cspan x, std::span<double> y) {
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(y.data() + i, vfmaq_f64(vld1q_f64(y.data() + i), va, vld1q_f64(x.data() + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kTable{Isa::Neon, dot, sum, sum_squares, squared_distance, sum_abs_diff, squared_distance,
                             sum_abs_relative_error, sum_squared_deviation, axpy};

}  // namespace

const KernelTable& table() noexcept { return kTable; }

}  // namespace elyte::simd::neon
