#include "elyte/forecaster.hpp"

#include "elyte/error.hpp"
#include "elyte/simd/kernels.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace elyte {

std::vector<ForestParams> ParamGrid::expand() const {
  std::vector<ForestParams> out;
  for (int t : n_trees) {
    for (const auto& d : max_depth) {
      for (int leaf : min_samples_leaf) {
        for (const auto& mf : max_features) {
          ForestParams p;
          p.n_trees = t;
          p.max_depth = d;
          p.min_samples_leaf = leaf;
          p.max_features = mf;
          p.seed = seed;
          out.push_back(p);
        }
      }
    }
  }
  return out;
}

std::size_t development_size(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) fail(ErrorCode::InvalidConfig, "train_fraction must be in (0, 1]");
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> contiguous_folds(std::size_t n, int k) {
  if (k < 2) fail(ErrorCode::InvalidConfig, "need at least 2 folds");
  const auto kk = static_cast<std::size_t>(k);
  if (n < kk) {
    fail(ErrorCode::InsufficientData, "cannot make " + std::to_string(k) + " folds from " + std::to_string(n) + " samples");
  }
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds;
  const std::size_t base = n / kk;
  const std::size_t extra = n % kk;
  std::size_t start = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    std::vector<std::size_t> train;
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < n; ++i) (i >= start && i < start + len ? valid : train).push_back(i);
    folds.emplace_back(std::move(train), std::move(valid));
    start += len;
  }
  return folds;
}

namespace {

double rmse(std::span<const double> actual, std::span<const double> predicted) {
  return std::sqrt(simd::sum_squared_diff(actual, predicted) / static_cast<double>(actual.size()));
}

/// true when a should be preferred over b at equal CV error
bool simpler(const ForestParams& a, const ForestParams& b) {
  if (a.n_trees != b.n_trees) return a.n_trees < b.n_trees;
  const int da = a.max_depth.value_or(INT_MAX);
  const int db = b.max_depth.value_or(INT_MAX);
  return da < db;
}

}  // namespace

GridSearchResult grid_search_cv(const WindowedDataset& ds, const std::vector<ForestParams>& grid,
                                const CvOptions& options) {
  if (grid.empty()) fail(ErrorCode::InvalidConfig, "empty parameter grid");
  for (const auto& p : grid) p.validate();
  if (ds.empty()) fail(ErrorCode::EmptyDataset, "empty dataset");

  const std::size_t n = ds.size();
  const std::size_t dev = development_size(n, options.train_fraction);
  if (dev < static_cast<std::size_t>(std::max(options.folds, 2))) {
    fail(ErrorCode::InsufficientData, std::to_string(n) + " samples leave " + std::to_string(dev) +
                                          " for development, fewer than " + std::to_string(options.folds) + " folds");
  }
  const auto all = DesignMatrix::from_dataset(ds);
  std::vector<std::size_t> dev_idx(dev);
  std::iota(dev_idx.begin(), dev_idx.end(), 0);
  const auto dev_data = DesignMatrix::subset(all, dev_idx);
  const auto folds = contiguous_folds(dev, options.folds);

  struct FoldData {
    DesignMatrix train;
    DesignMatrix valid;
  };
  std::vector<FoldData> fold_data;
  fold_data.reserve(folds.size());
  for (const auto& [train, valid] : folds) {
    fold_data.push_back({DesignMatrix::subset(dev_data, train), DesignMatrix::subset(dev_data, valid)});
  }

  GridSearchResult result;
  result.development_size = dev;
  result.holdout_size = n - dev;
  result.cv_table.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    result.cv_table[g].params = grid[g];
    result.cv_table[g].fold_rmse.assign(folds.size(), 0.0);
  }

  const std::size_t jobs = grid.size() * folds.size();
  parallel_for(jobs, options.threads, [&](std::size_t job) {
    const std::size_t g = job / folds.size();
    const std::size_t f = job % folds.size();
    const auto& fd = fold_data[f];
    const auto model = fit_forest(fd.train, grid[g], 1);
    const auto pred = predict_rows(model, fd.valid);
    result.cv_table[g].fold_rmse[f] = rmse(fd.valid.targets(), pred);
  });

  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto& row = result.cv_table[g];
    row.mean_rmse = std::accumulate(row.fold_rmse.begin(), row.fold_rmse.end(), 0.0) / static_cast<double>(folds.size());
    if (g == 0) continue;
    const auto& cur = result.cv_table[best];
    if (row.mean_rmse < cur.mean_rmse || (row.mean_rmse == cur.mean_rmse && simpler(row.params, cur.params))) best = g;
  }
  result.best = grid[best];

  WindowedDataset dev_ds;
  dev_ds.analyte = ds.analyte;
  dev_ds.window_size = ds.window_size;
  dev_ds.target_offset = ds.target_offset;
  dev_ds.feature_names = ds.feature_names;
  dev_ds.rows.assign(ds.rows.begin(), ds.rows.begin() + static_cast<std::ptrdiff_t>(dev));
  result.model = fit_forest(dev_ds, result.best, options.threads);
  return result;
}

void write_cv_csv(std::ostream& out, const std::vector<CvRow>& table) {
  out << "n_trees,max_depth,min_samples_leaf,max_features,seed";
  const std::size_t k = table.empty() ? 0 : table.front().fold_rmse.size();
  for (std::size_t f = 0; f < k; ++f) out << ",fold" << f + 1 << "_rmse";
  out << ",mean_rmse\n";
  std::ostringstream num;
  num.precision(17);
  for (const auto& row : table) {
    out << row.params.n_trees << ',' << (row.params.max_depth ? std::to_string(*row.params.max_depth) : "inf") << ','
        << row.params.min_samples_leaf << ',' << row.params.max_features.label() << ',' << row.params.seed;
    for (double v : row.fold_rmse) {
      num.str("");
      num << v;
      out << ',' << num.str();
    }
    num.str("");
    num << row.mean_rmse;
    out << ',' << num.str() << '\n';
  }
}

const Prediction* PredictionSet::find(std::string_view analyte) const {
  for (const auto& e : entries) {
    if (e.analyte == analyte) return &e;
  }
  return nullptr;
}

PredictionSet predict_all(const PatientRecord& record, const Catalog& catalog,
                          const std::map<std::string, ForestModel>& models, const std::vector<std::string>& analytes,
                          Date as_of, const InfluenceRegistry& registry, const SupplementRegistry& supplements) {
  PredictionSet out;
  out.as_of = as_of;
  for (const auto& raw : analytes) {
    const std::string analyte = canonical_name(raw);
    auto it = models.find(analyte);
    if (it == models.end()) fail(ErrorCode::UntrainedAnalyte, "no trained model for '" + analyte + "'");
    const auto& model = it->second;
    const auto& sets = registry.get(analyte);
    std::vector<double> features;
    try {
      features = latest_window(record, catalog, sets, as_of, model.window_size, supplements);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoLabHistory) fail(ErrorCode::InsufficientHistory, e.what());
      throw;
    }
    const double value = predict(model, features);
    if (!std::isfinite(value)) fail(ErrorCode::Validation, "non-finite prediction for " + analyte);
    out.entries.push_back({analyte, value, as_of, add_days(as_of, 1)});
  }
  return out;
}

}  // namespace elyte
