#pragma once

#include "elyte/features.hpp"
#include "elyte/forest.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace elyte {

struct ParamGrid {
  std::vector<int> n_trees{100, 300};
  std::vector<std::optional<int>> max_depth{std::nullopt, 8};
  std::vector<int> min_samples_leaf{1, 3};
  std::vector<MaxFeatures> max_features{MaxFeatures::all(), MaxFeatures::third()};
  std::uint64_t seed = 42;

  /// Cartesian product in declaration order (n_trees outermost).
  std::vector<ForestParams> expand() const;
};

struct CvOptions {
  int folds = 5;
  double train_fraction = 0.6;  // leading share of the time-ordered samples used for model selection
  unsigned threads = 0;
};

struct CvRow {
  ForestParams params;
  std::vector<double> fold_rmse;
  double mean_rmse = 0.0;
};

struct GridSearchResult {
  ForestParams best;
  std::vector<CvRow> cv_table;
  ForestModel model;  // refit on the whole development set
  std::size_t development_size = 0;
  std::size_t holdout_size = 0;
};

/// Number of leading samples that form the development set.
std::size_t development_size(std::size_t n, double train_fraction);

/// k contiguous validation blocks over [0, n); sizes differ by at most one.
/// Each entry is (train indices, validation indices).
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> contiguous_folds(std::size_t n, int k);

/// Chronological model selection: the first `train_fraction` of the samples is
/// the development set, scored by k-fold CV (mean fold RMSE, ties to fewer
/// trees then shallower depth); the winner is refit on the development set.
/// Samples after the development set are the holdout. Throws InsufficientData.
GridSearchResult grid_search_cv(const WindowedDataset& ds, const std::vector<ForestParams>& grid,
                                const CvOptions& options = {});

void write_cv_csv(std::ostream& out, const std::vector<CvRow>& table);

struct Prediction {
  std::string analyte;
  double value = 0.0;
  Date as_of;        // last day of the input window
  Date target_date;  // as_of + 1
};

struct PredictionSet {
  Date as_of;
  std::vector<Prediction> entries;

  const Prediction* find(std::string_view analyte) const;
};

/// One-step forecasts for each analyte from the window ending at `as_of`.
/// Throws UntrainedAnalyte when `models` lacks an analyte.
PredictionSet predict_all(const PatientRecord& record, const Catalog& catalog,
                          const std::map<std::string, ForestModel>& models, const std::vector<std::string>& analytes,
                          Date as_of, const InfluenceRegistry& registry = InfluenceRegistry::defaults(),
                          const SupplementRegistry& supplements = SupplementRegistry::defaults());

}  // namespace elyte
