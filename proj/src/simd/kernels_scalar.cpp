#include "elyte/simd/kernels.hpp"

#include <cmath>

namespace elyte::simd::scalar {

namespace {

double dot(cspan a, cspan b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum(cspan a) {
  double acc = 0.0;
  for (double v : a) acc += v;
  return acc;
}

double sum_squares(cspan a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

double squared_distance(cspan a, cspan b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_abs_diff(cspan a, cspan b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double sum_squared_diff(cspan a, cspan b) { return squared_distance(a, b); }

double sum_abs_relative_error(cspan actual, cspan predicted) {
  double acc = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    acc += std::fabs(predicted[i] - actual[i]) / std::fabs(actual[i]);
  }
  return acc;
}

double sum_squared_deviation(cspan a, double center) {
  double acc = 0.0;
  for (double v : a) {
    const double d = v - center;
    acc += d * d;
  }
  return acc;
}

void axpy(double alpha, cspan x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kTable{Isa::Scalar,  dot,  sum, sum_squares, squared_distance, sum_abs_diff, sum_squared_diff,
                             sum_abs_relative_error, sum_squared_deviation, axpy};

}  // namespace

const KernelTable& table() noexcept { return kTable; }

}  // namespace elyte::simd::scalar
