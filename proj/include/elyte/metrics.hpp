#pragma once

#include <span>

namespace elyte {

struct MetricsReport {
  std::size_t n = 0;
  double mae = 0.0;
  double mape = 0.0;  // fraction, not percent
  double mse = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double accuracy = 0.0;  // 100 * (1 - mape)
};

/// Throws LengthMismatch (sizes differ or n < 2), ZeroActual, ConstantActuals.
MetricsReport metrics(std::span<const double> actual, std::span<const double> predicted);

/// Percentage accuracy for a MAPE given as a fraction.
inline double accuracy_from_mape(double mape) { return 100.0 * (1.0 - mape); }

}  // namespace elyte
