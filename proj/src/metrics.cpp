#include "elyte/metrics.hpp"

#include "elyte/error.hpp"
#include "elyte/simd/kernels.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace elyte {

MetricsReport metrics(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    fail(ErrorCode::LengthMismatch, "actual has " + std::to_string(actual.size()) + " values, predicted has " +
                                        std::to_string(predicted.size()));
  }
  if (actual.size() < 2) fail(ErrorCode::LengthMismatch, "need at least 2 values");
  for (double y : actual) {
    if (y == 0.0) fail(ErrorCode::ZeroActual, "MAPE is undefined when an actual value is 0");
  }

  const std::size_t n = actual.size();
  const double dn = static_cast<double>(n);
  const double mean = simd::sum(actual) / dn;
  // SST through the same kernel as SSR, so the mean predictor scores exactly 0
  const std::vector<double> centre(n, mean);
  const double sst = simd::sum_squared_diff(actual, centre);
  if (sst == 0.0) fail(ErrorCode::ConstantActuals, "R^2 is undefined for constant actual values");
  const double ssr = simd::sum_squared_diff(actual, predicted);

  MetricsReport r;
  r.n = n;
  r.mae = simd::sum_abs_diff(actual, predicted) / dn;
  r.mape = simd::sum_abs_relative_error(actual, predicted) / dn;
  r.mse = ssr / dn;
  r.rmse = std::sqrt(r.mse);
  r.r2 = 1.0 - ssr / sst;
  r.accuracy = accuracy_from_mape(r.mape);
  return r;
}

}  // namespace elyte
