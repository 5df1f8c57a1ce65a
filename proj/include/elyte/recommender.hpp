#pragma once

#include "elyte/dates.hpp"
#include "elyte/food_catalog.hpp"
#include "elyte/optimizer.hpp"
#include "elyte/patient.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace elyte {

/// Per-feature min-max scaling fitted on the catalog (missing values ignored).
/// Scoring and clustering happen in this space; missing values map to 0.
class FeatureScaler {
public:
  static FeatureScaler fit(const Catalog& catalog);

  double normalize(std::size_t k, double value) const;
  std::vector<double> transform(const FoodItemVector& item) const;
  double lo(std::size_t k) const { return lo_[k]; }
  double hi(std::size_t k) const { return hi_[k]; }
  std::size_t size() const { return lo_.size(); }

private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

struct ClassWeightVector {
  int class_id = 0;
  std::vector<double> centroid;             // mean member vector, catalog units
  std::vector<double> normalized_centroid;  // the same mean in scaled space
  std::vector<std::string> member_ids;
  std::vector<double> range_lo;
  std::vector<double> range_hi;
};

struct ClusterOptions {
  int max_iterations = 100;
  double tolerance = 1e-9;  // stop when no centroid moves farther than this
};

/// k-means over scaled item vectors with farthest-point seeding (first
/// centre drawn from `seed`). Throws EmptyCatalog, BadC.
std::vector<ClassWeightVector> cluster_items(const Catalog& catalog, std::size_t classes, std::uint64_t seed,
                                             const ClusterOptions& options = {});

struct PreferenceVector {
  std::vector<double> weights;  // unit length, >= 0
  int tau_days = 30;
  bool cold_start = false;

  /// Number of nonzero weights.
  std::size_t support() const;
};

/// Frequency-weighted mean of the scaled vectors of items eaten in
/// (as_of - tau, as_of] plus liked items (one count each), normalised to unit
/// length. No history gives a uniform vector.
PreferenceVector preference_vector(const PatientRecord& record, const Catalog& catalog, const FeatureScaler& scaler,
                                   int tau_days, Date as_of);

struct CombinedVector {
  std::vector<double> weights;
  std::vector<std::uint8_t> mandatory;
  std::vector<double> remaining_lo;  // max(0, AI - consumed)
  std::vector<double> remaining_hi;  // MI - consumed, +inf when MI is not set
  std::size_t preference_support = 0;

  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();
};

/// Mandatory features take the scaled midpoint of the remaining allowance;
/// the rest copy the preference weights.
CombinedVector combined_vector(const PreferenceVector& pwv, const OptimizedRequirements& requirements,
                               const DayTotals& consumed_today, const Catalog& catalog, const FeatureScaler& scaler);

/// Cosine similarity; 0 when either vector has zero norm. Throws DimensionMismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double class_similarity(const ClassWeightVector& cwv, const CombinedVector& uwv);
/// Cosine between a scaled item vector and the preference vector, skipping
/// features the item does not report.
double item_similarity(const FoodItemVector& item, std::span<const double> scaled_item, const PreferenceVector& pwv);

/// Upper-bound test per mandatory feature: the item's per-serving amount must
/// not exceed max(0, remaining MI). Unreported amounts fail a bounded feature.
bool satisfies_mandatory(const FoodItemVector& item, const CombinedVector& uwv);

/// Requirement satisfaction score: base in [0, 1) plus 1 when every
/// mandatory check passes.
double rq_score(const FoodItemVector& item, std::span<const double> scaled_item, const CombinedVector& uwv);

struct NutrientFit {
  std::string nutrient;
  double consumed = 0.0;
  double remaining_lo = 0.0;
  double remaining_hi = 0.0;  // +inf when unbounded
  double item_amount = 0.0;   // per serving
  bool missing = false;
  bool pass = true;
};

struct RecommendedItem {
  std::string item_id;
  std::string name;
  double similarity = 0.0;
  double satisfaction = 0.0;
  double serving_size = 0.0;
  std::vector<NutrientFit> fit;
};

struct Recommendation {
  Date date;
  int meal_index = 1;
  std::vector<RecommendedItem> items;
};

struct RecommendOptions {
  std::size_t k = 5;
  std::size_t top_classes = 3;
  int tau_days = 30;
};

/// Clustered catalog plus cached scaled vectors; immutable once built.
class Recommender {
public:
  Recommender(const Catalog& catalog, std::size_t classes, std::uint64_t seed = 7);

  const Catalog& catalog() const { return catalog_; }
  const FeatureScaler& scaler() const { return scaler_; }
  const std::vector<ClassWeightVector>& classes() const { return classes_; }
  std::span<const double> scaled(std::size_t item_index) const;

  /// Pick the top classes by class similarity to the combined vector, keep
  /// members with rq_score >= 1, rank by item similarity (ties by item id).
  /// Throws NoFeasibleItem when nothing qualifies.
  Recommendation recommend(const PatientRecord& record, const OptimizedRequirements& requirements, Date date,
                           int meal_index, const RecommendOptions& options = {}) const;

private:
  const Catalog& catalog_;
  FeatureScaler scaler_;
  std::vector<ClassWeightVector> classes_;
  std::vector<double> scaled_;  // row-major, item x feature
};

}  // namespace elyte
