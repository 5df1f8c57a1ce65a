#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library code it checks.

#include "elyte/food_catalog.hpp"
#include "elyte/patient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// Lowest child SSE over every (feature, cut between distinct values) pair,
/// by direct summation over the two sides. Returns +inf when no cut exists.
inline double best_split_sse(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = y.size();
  const std::size_t p = n ? x[0].size() : 0;
  auto sse = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double a : v) s += (a - m) * (a - m);
    return s;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < p; ++f) {
    std::set<double> values;
    for (std::size_t i = 0; i < n; ++i) values.insert(x[i][f]);
    for (double cut : values) {
      std::vector<double> left, right;
      for (std::size_t i = 0; i < n; ++i) (x[i][f] <= cut ? left : right).push_back(y[i]);
      if (left.empty() || right.empty()) continue;
      best = std::min(best, sse(left) + sse(right));
    }
  }
  return best;
}

/// Child SSE of the partition x[f] <= t.
inline double partition_sse(const std::vector<std::vector<double>>& x, const std::vector<double>& y, int f, double t) {
  std::vector<double> left, right;
  for (std::size_t i = 0; i < y.size(); ++i) (x[i][f] <= t ? left : right).push_back(y[i]);
  auto sse = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double a : v) s += (a - m) * (a - m);
    return s;
  };
  return sse(left) + sse(right);
}

struct Metrics {
  long double mae, mape, mse, rmse, r2;
};

/// Textbook formulas in long double with plain loops.
inline Metrics metrics(const std::vector<double>& y, const std::vector<double>& yhat) {
  const std::size_t n = y.size();
  long double mean = 0;
  for (double v : y) mean += v;
  mean /= n;
  long double abs_err = 0, pct = 0, sq = 0, tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double e = static_cast<long double>(yhat[i]) - y[i];
    abs_err += std::fabs(e);
    pct += std::fabs(e / y[i]);
    sq += e * e;
    tot += (y[i] - mean) * (y[i] - mean);
  }
  Metrics m{};
  m.mae = abs_err / n;
  m.mape = pct / n;
  m.mse = sq / n;
  m.rmse = std::sqrt(m.mse);
  m.r2 = 1 - sq / tot;
  return m;
}

/// Daily budget state: per nutrient MI (nullopt = unbounded) and amount consumed.
struct Budget {
  std::map<std::string, std::optional<double>> mi;
  std::map<std::string, double> consumed;
};

/// Items whose per-serving amount of every bounded nutrient is reported and
/// does not exceed max(0, MI - consumed).
inline std::set<std::string> feasible_items(const elyte::Catalog& catalog, const Budget& b) {
  std::set<std::string> out;
  for (const auto& item : catalog.items()) {
    bool ok = true;
    for (const auto& [nutrient, mi] : b.mi) {
      if (!mi) continue;
      std::size_t k = 0;
      while (k < catalog.nutrients().size() && catalog.nutrients()[k].id != nutrient) ++k;
      if (k == catalog.nutrients().size()) continue;
      if (item.missing[k]) {
        ok = false;
        break;
      }
      const double amount = item.values[k] * item.serving_size / 100.0;
      const auto c = b.consumed.count(nutrient) ? b.consumed.at(nutrient) : 0.0;
      if (amount > std::max(0.0, *mi - c)) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(item.item_id);
  }
  return out;
}

}  // namespace oracle
