#pragma once

#include "elyte/dates.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elyte {

struct WindowedDataset;

// ---------------------------------------------------------------------------
// random streams

/// splitmix64 finalizer; used to derive independent substreams from a seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Seedable generator with named substreams. Draws are defined by the
/// mt19937_64 sequence, so results are identical across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(mix_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal();

private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// parameters

struct MaxFeatures {
  enum class Kind { All, Count, Fraction, Third };
  Kind kind = Kind::All;
  double value = 0.0;

  static MaxFeatures all() { return {}; }
  static MaxFeatures count(std::size_t n) { return {Kind::Count, static_cast<double>(n)}; }
  static MaxFeatures fraction(double f) { return {Kind::Fraction, f}; }
  static MaxFeatures third() { return {Kind::Third, 0.0}; }  // ceil(p / 3)

  /// Candidate features per split for p total features, in [1, p].
  std::size_t resolve(std::size_t p) const;
  std::string label() const;
  static MaxFeatures parse(std::string_view text);  // "all", "third", "0.5", "7"
  bool operator==(const MaxFeatures&) const = default;
};

struct ForestParams {
  int n_trees = 100;
  std::optional<int> max_depth;  // nullopt = unlimited
  int min_samples_leaf = 1;
  MaxFeatures max_features;
  std::uint64_t seed = 42;
  bool bootstrap = true;  // false only for tests

  void validate() const;
  std::string label() const;
  bool operator==(const ForestParams&) const = default;
};

// ---------------------------------------------------------------------------
// data

/// Column-major feature matrix plus targets.
class DesignMatrix {
public:
  DesignMatrix() = default;
  DesignMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), x_(rows * cols, 0.0), y_(rows, 0.0) {}

  static DesignMatrix from_rows(const std::vector<std::vector<double>>& features, std::span<const double> targets);
  static DesignMatrix from_dataset(const WindowedDataset& ds);
  /// Rows `idx` of `src`, in that order.
  static DesignMatrix subset(const DesignMatrix& src, std::span<const std::size_t> idx);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& x(std::size_t r, std::size_t c) { return x_[c * rows_ + r]; }
  double x(std::size_t r, std::size_t c) const { return x_[c * rows_ + r]; }
  std::span<const double> column(std::size_t c) const { return {x_.data() + c * rows_, rows_}; }
  std::vector<double> row(std::size_t r) const;
  std::span<double> targets() noexcept { return y_; }
  std::span<const double> targets() const noexcept { return y_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
};

// ---------------------------------------------------------------------------
// trees

/// Flattened regression tree. Node 0 is the root; a node with feature < 0 is a
/// leaf predicting `value`. Samples with x[feature] <= threshold go left.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
  std::uint32_t count = 0;  // training samples (bootstrap multiplicity included)

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class RegressionTree {
public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const;
  int depth() const;
  bool operator==(const RegressionTree&) const = default;

private:
  std::vector<TreeNode> nodes_;
};

/// Greedy CART on the rows of `data` with the given multiplicities
/// (`weights[r]` copies of row r; empty = each row once). Splits minimise the
/// summed squared error of the children; thresholds are midpoints between
/// consecutive distinct values. Throws EmptyDataset.
RegressionTree fit_tree(const DesignMatrix& data, const ForestParams& params, Rng& rng,
                        std::span<const std::uint32_t> weights = {});

// ---------------------------------------------------------------------------
// forest

struct ForestModel {
  static constexpr int kSchemaVersion = 1;

  ForestParams params;
  std::vector<RegressionTree> trees;
  std::vector<std::string> feature_names;
  std::string target_analyte;
  double target_lo = 0.0;
  double target_hi = 0.0;
  int window_size = 3;
  int target_offset = 1;

  bool operator==(const ForestModel&) const = default;
};

/// Bagged ensemble; tree t draws its bootstrap from substream t of the seed.
/// `threads` = 0 uses the hardware concurrency. Output does not depend on it.
ForestModel fit_forest(const DesignMatrix& data, const ForestParams& params, unsigned threads = 0);
ForestModel fit_forest(const WindowedDataset& ds, const ForestParams& params, unsigned threads = 0);

/// Mean of the per-tree predictions. Throws DimensionMismatch.
double predict(const ForestModel& model, std::span<const double> features);
std::vector<double> predict_rows(const ForestModel& model, const DesignMatrix& data);

/// Runs `fn(i)` for i in [0, n) over up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace elyte
