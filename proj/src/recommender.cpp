#include "elyte/recommender.hpp"

#include "elyte/error.hpp"
#include "elyte/forest.hpp"
#include "elyte/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace elyte {

namespace {

constexpr double kEpsilon = 1e-9;

std::size_t index_of(const Catalog& catalog, const FoodItemVector* item) {
  return static_cast<std::size_t>(item - catalog.items().data());
}

}  // namespace

// ---------------------------------------------------------------------------
// scaling

FeatureScaler FeatureScaler::fit(const Catalog& catalog) {
  FeatureScaler s;
  const std::size_t p = catalog.feature_count();
  s.lo_.assign(p, 0.0);
  s.hi_.assign(p, 0.0);
  std::vector<bool> seen(p, false);
  for (const auto& item : catalog.items()) {
    for (std::size_t k = 0; k < p; ++k) {
      if (item.is_missing(k)) continue;
      const double v = item.values[k];
      if (!seen[k]) {
        s.lo_[k] = s.hi_[k] = v;
        seen[k] = true;
      } else {
        s.lo_[k] = std::min(s.lo_[k], v);
        s.hi_[k] = std::max(s.hi_[k], v);
      }
    }
  }
  return s;
}

double FeatureScaler::normalize(std::size_t k, double value) const {
  const double span = hi_[k] - lo_[k];
  if (span <= 0.0) return value > lo_[k] ? 1.0 : 0.0;
  return (value - lo_[k]) / span;
}

std::vector<double> FeatureScaler::transform(const FoodItemVector& item) const {
  std::vector<double> out(lo_.size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!item.is_missing(k)) out[k] = normalize(k, item.values[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// clustering

namespace {

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<std::vector<double>> centres;
};

KMeansResult kmeans(const std::vector<double>& points, std::size_t n, std::size_t p, std::size_t c,
                    std::uint64_t seed, const ClusterOptions& options) {
  auto row = [&](std::size_t i) { return std::span<const double>(points.data() + i * p, p); };

  KMeansResult r;
  Rng rng(seed);
  std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(n))};
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = simd::squared_distance(row(i), row(chosen[0]));
  while (chosen.size() < c) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    chosen.push_back(far);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], simd::squared_distance(row(i), row(far)));
  }
  for (std::size_t j : chosen) r.centres.emplace_back(row(j).begin(), row(j).end());

  r.assignment.assign(n, 0);
  const double tol2 = options.tolerance * options.tolerance;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = simd::squared_distance(row(i), r.centres[0]);
      for (std::size_t j = 1; j < c; ++j) {
        const double d = simd::squared_distance(row(i), r.centres[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      r.assignment[i] = best;
    }
    std::vector<std::vector<double>> next(c, std::vector<double>(p, 0.0));
    std::vector<std::size_t> counts(c, 0);
    for (std::size_t i = 0; i < n; ++i) {
      simd::axpy(1.0, row(i), next[r.assignment[i]]);
      ++counts[r.assignment[i]];
    }
    double moved = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      if (counts[j] == 0) {
        next[j] = r.centres[j];  // empty class keeps its centre
        continue;
      }
      for (double& v : next[j]) v /= static_cast<double>(counts[j]);
      moved = std::max(moved, simd::squared_distance(next[j], r.centres[j]));
    }
    r.centres = std::move(next);
    if (moved <= tol2) break;
  }
  return r;
}

}  // namespace

std::vector<ClassWeightVector> cluster_items(const Catalog& catalog, std::size_t classes, std::uint64_t seed,
                                             const ClusterOptions& options) {
  const std::size_t n = catalog.size();
  if (n == 0) fail(ErrorCode::EmptyCatalog, "catalog has no items");
  if (classes < 1 || classes > n) {
    fail(ErrorCode::BadC, "number of classes must be in [1, " + std::to_string(n) + "], got " + std::to_string(classes));
  }
  const std::size_t p = catalog.feature_count();
  const auto scaler = FeatureScaler::fit(catalog);
  std::vector<double> points;
  points.reserve(n * p);
  for (const auto& item : catalog.items()) {
    const auto v = scaler.transform(item);
    points.insert(points.end(), v.begin(), v.end());
  }
  const auto km = kmeans(points, n, p, classes, seed, options);

  std::vector<ClassWeightVector> out(classes);
  for (std::size_t j = 0; j < classes; ++j) {
    auto& cw = out[j];
    cw.class_id = static_cast<int>(j);
    cw.normalized_centroid = km.centres[j];
    cw.centroid.assign(p, 0.0);
    cw.range_lo.assign(p, std::numeric_limits<double>::infinity());
    cw.range_hi.assign(p, -std::numeric_limits<double>::infinity());
  }
  std::vector<std::vector<std::size_t>> reported(classes, std::vector<std::size_t>(p, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& item = catalog.items()[i];
    auto& cw = out[km.assignment[i]];
    cw.member_ids.push_back(item.item_id);
    for (std::size_t k = 0; k < p; ++k) {
      if (item.is_missing(k)) continue;
      cw.centroid[k] += item.values[k];
      cw.range_lo[k] = std::min(cw.range_lo[k], item.values[k]);
      cw.range_hi[k] = std::max(cw.range_hi[k], item.values[k]);
      ++reported[km.assignment[i]][k];
    }
  }
  for (std::size_t j = 0; j < classes; ++j) {
    for (std::size_t k = 0; k < p; ++k) {
      if (reported[j][k] == 0) {
        out[j].centroid[k] = 0.0;
        out[j].range_lo[k] = out[j].range_hi[k] = 0.0;
      } else {
        out[j].centroid[k] /= static_cast<double>(reported[j][k]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// vectors

std::size_t PreferenceVector::support() const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0.0; }));
}

PreferenceVector preference_vector(const PatientRecord& record, const Catalog& catalog, const FeatureScaler& scaler,
                                   int tau_days, Date as_of) {
  if (tau_days < 1) fail(ErrorCode::InvalidConfig, "tau_days must be >= 1");
  const std::size_t p = catalog.feature_count();
  PreferenceVector out;
  out.tau_days = tau_days;
  out.weights.assign(p, 0.0);

  std::map<std::string, double> counts;
  const Date first = add_days(as_of, -(tau_days - 1));
  for (const auto& e : record.intake_log) {
    if (!e.item_id || e.date < first || e.date > as_of) continue;
    if (catalog.contains(*e.item_id)) counts[*e.item_id] += 1.0;
  }
  for (const auto& id : record.profile.liked_items) {
    if (catalog.contains(id)) counts[id] += 1.0;
  }

  double total = 0.0;
  for (const auto& [id, count] : counts) {
    const auto v = scaler.transform(*catalog.find(id));
    simd::axpy(count, v, out.weights);
    total += count;
  }
  const double norm = std::sqrt(simd::sum_squares(out.weights));
  if (total == 0.0 || norm == 0.0) {
    out.cold_start = true;
    std::fill(out.weights.begin(), out.weights.end(), p ? 1.0 / std::sqrt(static_cast<double>(p)) : 0.0);
    return out;
  }
  // the mean and the unit vector point the same way; divide once
  for (double& w : out.weights) w /= norm;
  return out;
}

CombinedVector combined_vector(const PreferenceVector& pwv, const OptimizedRequirements& requirements,
                               const DayTotals& consumed_today, const Catalog& catalog, const FeatureScaler& scaler) {
  const std::size_t p = catalog.feature_count();
  if (pwv.weights.size() != p) fail(ErrorCode::DimensionMismatch, "preference vector does not match catalog features");
  CombinedVector out;
  out.weights = pwv.weights;
  out.mandatory.assign(p, 0);
  out.remaining_lo.assign(p, 0.0);
  out.remaining_hi.assign(p, CombinedVector::kUnbounded);
  out.preference_support = pwv.support();

  for (const auto& n : requirements.nutrients) {
    if (!n.mandatory()) continue;
    const auto k = catalog.feature_index(n.nutrient);
    if (!k) continue;  // not a catalog feature; cannot be checked per item
    const double consumed = consumed_today.effective_amount(n.nutrient);
    const double lo = n.ai ? std::max(0.0, *n.ai - consumed) : 0.0;
    const double hi = n.mi ? *n.mi - consumed : CombinedVector::kUnbounded;
    out.mandatory[*k] = 1;
    out.remaining_lo[*k] = lo;
    out.remaining_hi[*k] = hi;
    const double mid = n.mi ? (lo + std::max(0.0, hi)) / 2.0 : lo;
    out.weights[*k] = std::clamp(scaler.normalize(*k, mid), 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// scores

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::DimensionMismatch,
         "vector lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  const double na = simd::sum_squares(a);
  const double nb = simd::sum_squares(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return simd::dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
}

double class_similarity(const ClassWeightVector& cwv, const CombinedVector& uwv) {
  return cosine_similarity(cwv.normalized_centroid, uwv.weights);
}

double item_similarity(const FoodItemVector& item, std::span<const double> scaled_item, const PreferenceVector& pwv) {
  if (scaled_item.size() != pwv.weights.size() || item.missing.size() != pwv.weights.size()) {
    fail(ErrorCode::DimensionMismatch, "item vector does not match preference vector");
  }
  std::vector<double> masked(pwv.weights);
  for (std::size_t k = 0; k < masked.size(); ++k) {
    if (item.is_missing(k)) masked[k] = 0.0;
  }
  return cosine_similarity(scaled_item, masked);
}

bool satisfies_mandatory(const FoodItemVector& item, const CombinedVector& uwv) {
  for (std::size_t k = 0; k < uwv.mandatory.size(); ++k) {
    if (!uwv.mandatory[k] || uwv.remaining_hi[k] == CombinedVector::kUnbounded) continue;
    if (item.is_missing(k)) return false;
    if (item.per_serving(k) > std::max(0.0, uwv.remaining_hi[k])) return false;
  }
  return true;
}

double rq_score(const FoodItemVector& item, std::span<const double> scaled_item, const CombinedVector& uwv) {
  const double cos = cosine_similarity(scaled_item, uwv.weights);
  const double base =
      std::clamp(cos / (static_cast<double>(uwv.preference_support) + kEpsilon), 0.0, 1.0 - kEpsilon);
  return base + (satisfies_mandatory(item, uwv) ? 1.0 : 0.0);
}

// ---------------------------------------------------------------------------
// recommender

Recommender::Recommender(const Catalog& catalog, std::size_t classes, std::uint64_t seed)
    : catalog_(catalog), scaler_(FeatureScaler::fit(catalog)), classes_(cluster_items(catalog, classes, seed)) {
  scaled_.reserve(catalog.size() * catalog.feature_count());
  for (const auto& item : catalog.items()) {
    const auto v = scaler_.transform(item);
    scaled_.insert(scaled_.end(), v.begin(), v.end());
  }
}

std::span<const double> Recommender::scaled(std::size_t item_index) const {
  const std::size_t p = catalog_.feature_count();
  return {scaled_.data() + item_index * p, p};
}

Recommendation Recommender::recommend(const PatientRecord& record, const OptimizedRequirements& requirements, Date date,
                                      int meal_index, const RecommendOptions& options) const {
  if (options.k < 1) fail(ErrorCode::InvalidConfig, "k must be >= 1");
  if (options.top_classes < 1) fail(ErrorCode::InvalidConfig, "top_classes must be >= 1");
  if (meal_index < 1) fail(ErrorCode::InvalidEntry, "meal index must be >= 1");

  const auto pwv = preference_vector(record, catalog_, scaler_, options.tau_days, date);
  const auto consumed = day_totals(record, catalog_, date);
  const auto uwv = combined_vector(pwv, requirements, consumed, catalog_, scaler_);

  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t j = 0; j < classes_.size(); ++j) ranked.emplace_back(class_similarity(classes_[j], uwv), j);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  ranked.resize(std::min(ranked.size(), options.top_classes));

  std::vector<RecommendedItem> pool;
  for (const auto& [sim, j] : ranked) {
    for (const auto& id : classes_[j].member_ids) {
      const auto* item = catalog_.find(id);
      const auto scaled_item = scaled(index_of(catalog_, item));
      const double rq = rq_score(*item, scaled_item, uwv);
      if (rq < 1.0) continue;
      RecommendedItem r;
      r.item_id = item->item_id;
      r.name = item->name;
      r.similarity = item_similarity(*item, scaled_item, pwv);
      r.satisfaction = rq;
      r.serving_size = item->serving_size;
      pool.push_back(std::move(r));
    }
  }
  if (pool.empty()) {
    fail(ErrorCode::NoFeasibleItem, "no item in the top " + std::to_string(ranked.size()) +
                                        " classes fits the remaining allowance for " + format_date(date));
  }
  std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.item_id < b.item_id;
  });
  if (pool.size() > options.k) pool.resize(options.k);

  for (auto& r : pool) {
    const auto& item = *catalog_.find(r.item_id);
    for (const auto& n : requirements.nutrients) {
      const auto k = catalog_.feature_index(n.nutrient);
      if (!n.mandatory() || !k) continue;
      NutrientFit fit;
      fit.nutrient = n.nutrient;
      fit.consumed = consumed.effective_amount(n.nutrient);
      fit.remaining_lo = uwv.remaining_lo[*k];
      fit.remaining_hi = uwv.remaining_hi[*k];
      fit.missing = item.is_missing(*k);
      fit.item_amount = fit.missing ? 0.0 : item.per_serving(*k);
      fit.pass = fit.remaining_hi == CombinedVector::kUnbounded ||
                 (!fit.missing && fit.item_amount <= std::max(0.0, fit.remaining_hi));
      r.fit.push_back(std::move(fit));
    }
  }

  Recommendation out;
  out.date = date;
  out.meal_index = meal_index;
  out.items = std::move(pool);
  return out;
}

}  // namespace elyte
