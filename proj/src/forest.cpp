#include "elyte/forest.hpp"

#include "elyte/error.hpp"
#include "elyte/features.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace elyte {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  // Marsaglia polar method
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  return u * f;
}

// ---------------------------------------------------------------------------

std::size_t MaxFeatures::resolve(std::size_t p) const {
  if (p == 0) return 0;
  std::size_t m = p;
  switch (kind) {
    case Kind::All: m = p; break;
    case Kind::Count: m = static_cast<std::size_t>(value); break;
    case Kind::Fraction: m = static_cast<std::size_t>(std::ceil(value * static_cast<double>(p) - 1e-9)); break;
    case Kind::Third: m = (p + 2) / 3; break;
  }
  return std::clamp<std::size_t>(m, 1, p);
}

std::string MaxFeatures::label() const {
  switch (kind) {
    case Kind::All: return "all";
    case Kind::Third: return "third";
    case Kind::Count: return std::to_string(static_cast<long long>(value));
    case Kind::Fraction: {
      std::ostringstream os;
      os << value;
      return os.str();
    }
  }
  return "?";
}

MaxFeatures MaxFeatures::parse(std::string_view text) {
  if (text == "all") return all();
  if (text == "third") return third();
  const std::string s(text);
  try {
    std::size_t used = 0;
    if (s.find('.') == std::string::npos) {
      const long long n = std::stoll(s, &used);
      if (used == s.size() && n >= 1) return count(static_cast<std::size_t>(n));
    } else {
      const double f = std::stod(s, &used);
      if (used == s.size() && f > 0.0 && f <= 1.0) return fraction(f);
    }
  } catch (const std::exception&) {
  }
  fail(ErrorCode::InvalidConfig, "bad max_features '" + s + "'");
}

void ForestParams::validate() const {
  if (n_trees < 1) fail(ErrorCode::InvalidConfig, "n_trees must be >= 1");
  if (min_samples_leaf < 1) fail(ErrorCode::InvalidConfig, "min_samples_leaf must be >= 1");
  if (max_depth && *max_depth < 0) fail(ErrorCode::InvalidConfig, "max_depth must be >= 0");
  if (max_features.kind == MaxFeatures::Kind::Fraction && !(max_features.value > 0.0 && max_features.value <= 1.0)) {
    fail(ErrorCode::InvalidConfig, "max_features fraction must be in (0, 1]");
  }
  if (max_features.kind == MaxFeatures::Kind::Count && max_features.value < 1.0) {
    fail(ErrorCode::InvalidConfig, "max_features count must be >= 1");
  }
}

std::string ForestParams::label() const {
  std::ostringstream os;
  os << "n_trees=" << n_trees << " max_depth=" << (max_depth ? std::to_string(*max_depth) : "inf")
     << " min_samples_leaf=" << min_samples_leaf << " max_features=" << max_features.label();
  return os.str();
}

// ---------------------------------------------------------------------------

DesignMatrix DesignMatrix::from_rows(const std::vector<std::vector<double>>& features, std::span<const double> targets) {
  if (features.size() != targets.size()) fail(ErrorCode::DimensionMismatch, "feature rows and targets differ in length");
  const std::size_t p = features.empty() ? 0 : features.front().size();
  DesignMatrix m(features.size(), p);
  for (std::size_t r = 0; r < features.size(); ++r) {
    if (features[r].size() != p) fail(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t c = 0; c < p; ++c) {
      if (!std::isfinite(features[r][c])) fail(ErrorCode::Validation, "non-finite feature value");
      m.x(r, c) = features[r][c];
    }
    if (!std::isfinite(targets[r])) fail(ErrorCode::Validation, "non-finite target");
    m.y_[r] = targets[r];
  }
  return m;
}

DesignMatrix DesignMatrix::from_dataset(const WindowedDataset& ds) {
  DesignMatrix m(ds.rows.size(), ds.feature_count());
  for (std::size_t r = 0; r < ds.rows.size(); ++r) {
    const auto& s = ds.rows[r];
    if (s.features.size() != ds.feature_count()) fail(ErrorCode::DimensionMismatch, "sample width differs from feature names");
    for (std::size_t c = 0; c < s.features.size(); ++c) m.x(r, c) = s.features[c];
    m.y_[r] = s.target;
  }
  return m;
}

DesignMatrix DesignMatrix::subset(const DesignMatrix& src, std::span<const std::size_t> idx) {
  DesignMatrix m(idx.size(), src.cols_);
  for (std::size_t c = 0; c < src.cols_; ++c) {
    for (std::size_t r = 0; r < idx.size(); ++r) m.x(r, c) = src.x(idx[r], c);
  }
  for (std::size_t r = 0; r < idx.size(); ++r) m.y_[r] = src.y_[idx[r]];
  return m;
}

std::vector<double> DesignMatrix::row(std::size_t r) const {
  std::vector<double> out(cols_);
  for (std::size_t c = 0; c < cols_; ++c) out[c] = x(r, c);
  return out;
}

// ---------------------------------------------------------------------------

double RegressionTree::predict(std::span<const double> x) const {
  std::int32_t i = 0;
  while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[static_cast<std::size_t>(i)].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  int best = 0;
  std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    best = std::max(best, d);
    if (!n.is_leaf()) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return best;
}

namespace {

/// Row indices of every column sorted by (value, row).
using Presorted = std::vector<std::vector<std::uint32_t>>;

Presorted presort(const DesignMatrix& data) {
  Presorted out(data.cols());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    auto& order = out[c];
    order.resize(data.rows());
    std::iota(order.begin(), order.end(), 0U);
    const auto col = data.column(c);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return col[a] < col[b] || (col[a] == col[b] && a < b);
    });
  }
  return out;
}

class TreeBuilder {
public:
  TreeBuilder(const DesignMatrix& data, const Presorted& sorted, const ForestParams& params, Rng& rng,
              std::span<const std::uint32_t> weights)
      : data_(data), y_(data.targets()), params_(params), rng_(rng), p_(data.cols()) {
    const std::size_t n = data.rows();
    w_.assign(n, 1);
    if (!weights.empty()) {
      if (weights.size() != n) fail(ErrorCode::DimensionMismatch, "weights length differs from row count");
      std::copy(weights.begin(), weights.end(), w_.begin());
    }
    d_ = static_cast<std::size_t>(std::count_if(w_.begin(), w_.end(), [](std::uint32_t v) { return v > 0; }));
    if (d_ == 0) fail(ErrorCode::EmptyDataset, "cannot fit a tree on zero samples");
    order_.resize(p_ * d_);
    for (std::size_t f = 0; f < p_; ++f) {
      std::uint32_t* out = order_.data() + f * d_;
      for (std::uint32_t r : sorted[f]) {
        if (w_[r] > 0) *out++ = r;
      }
    }
    if (p_ == 0) {
      // no features: the tree is a single leaf over the active rows
      active_.reserve(d_);
      for (std::uint32_t r = 0; r < n; ++r) {
        if (w_[r] > 0) active_.push_back(r);
      }
    }
    perm_.resize(p_);
    std::iota(perm_.begin(), perm_.end(), 0U);
    goes_left_.assign(n, 0);
    scratch_.resize(d_);
    mtry_ = params.max_features.resolve(p_);
    max_depth_ = params.max_depth.value_or(std::numeric_limits<int>::max());
  }

  RegressionTree build() {
    grow(0, d_, 0);
    return RegressionTree(std::move(nodes_));
  }

private:
  const std::uint32_t* segment(std::size_t f) const { return order_.data() + f * d_; }

  std::int32_t grow(std::size_t b, std::size_t e, int depth) {
    const std::uint32_t* rows = p_ ? segment(0) : active_.data();
    double wsum = 0.0;
    double ysum = 0.0;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = -ymin;
    for (std::size_t t = b; t < e; ++t) {
      const std::uint32_t r = rows[t];
      wsum += w_[r];
      ysum += w_[r] * y_[r];
      ymin = std::min(ymin, y_[r]);
      ymax = std::max(ymax, y_[r]);
    }
    const auto index = static_cast<std::int32_t>(nodes_.size());
    TreeNode node;
    node.value = ysum / wsum;
    node.count = static_cast<std::uint32_t>(wsum);
    nodes_.push_back(node);

    const double min_leaf = params_.min_samples_leaf;
    if (p_ == 0 || depth >= max_depth_ || wsum < 2.0 * min_leaf || ymin == ymax) return index;

    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best_f = p_;
    std::size_t best_t = 0;
    double best_thr = 0.0;

    std::size_t visited = 0;
    for (std::size_t j = 0; j < p_ && visited < mtry_; ++j) {
      std::swap(perm_[j], perm_[j + rng_.below(p_ - j)]);
      const std::size_t f = perm_[j];
      const auto col = data_.column(f);
      const std::uint32_t* ord = segment(f);
      if (col[ord[b]] == col[ord[e - 1]]) continue;  // constant here, does not count
      ++visited;
      double wl = 0.0;
      double sl = 0.0;
      for (std::size_t t = b; t + 1 < e; ++t) {
        const std::uint32_t r = ord[t];
        wl += w_[r];
        sl += w_[r] * y_[r];
        const double xv = col[r];
        const double xn = col[ord[t + 1]];
        if (xv == xn) continue;
        const double wr = wsum - wl;
        if (wl < min_leaf) continue;
        if (wr < min_leaf) break;
        const double sr = ysum - sl;
        const double score = sl * sl / wl + sr * sr / wr;
        if (score > best_score) {
          best_score = score;
          best_f = f;
          best_t = t;
          double mid = xv + (xn - xv) / 2.0;
          if (!(mid < xn)) mid = xv;
          best_thr = mid;
        }
      }
    }
    if (best_f == p_) return index;

    const std::uint32_t* chosen = segment(best_f);
    for (std::size_t t = b; t < e; ++t) goes_left_[chosen[t]] = t <= best_t ? 1 : 0;
    const std::size_t n_left = best_t - b + 1;
    for (std::size_t f = 0; f < p_; ++f) {
      std::uint32_t* ord = order_.data() + f * d_;
      std::size_t l = b;
      std::size_t r = 0;
      for (std::size_t t = b; t < e; ++t) {
        const std::uint32_t row = ord[t];
        if (goes_left_[row]) ord[l++] = row;
        else scratch_[r++] = row;
      }
      std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(r), ord + l);
    }

    const std::int32_t left = grow(b, b + n_left, depth + 1);
    const std::int32_t right = grow(b + n_left, e, depth + 1);
    auto& n = nodes_[static_cast<std::size_t>(index)];
    n.feature = static_cast<std::int32_t>(best_f);
    n.threshold = best_thr;
    n.left = left;
    n.right = right;
    return index;
  }

  const DesignMatrix& data_;
  std::span<const double> y_;
  const ForestParams& params_;
  Rng& rng_;
  std::size_t p_;
  std::size_t d_ = 0;
  std::size_t mtry_ = 0;
  int max_depth_ = 0;
  std::vector<std::uint32_t> w_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> active_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint8_t> goes_left_;
  std::vector<std::uint32_t> scratch_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree fit_tree(const DesignMatrix& data, const ForestParams& params, Rng& rng,
                        std::span<const std::uint32_t> weights) {
  params.validate();
  if (data.rows() == 0) fail(ErrorCode::EmptyDataset, "cannot fit a tree on zero samples");
  const auto sorted = presort(data);
  return TreeBuilder(data, sorted, params, rng, weights).build();
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ForestModel fit_forest(const DesignMatrix& data, const ForestParams& params, unsigned threads) {
  params.validate();
  const std::size_t n = data.rows();
  if (n == 0) fail(ErrorCode::EmptyDataset, "cannot fit a forest on an empty dataset");

  const auto sorted = presort(data);
  ForestModel model;
  model.params = params;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));
  parallel_for(model.trees.size(), threads, [&](std::size_t t) {
    Rng rng(params.seed, t);
    std::vector<std::uint32_t> weights;
    if (params.bootstrap) {
      weights.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) ++weights[rng.below(n)];
    }
    model.trees[t] = TreeBuilder(data, sorted, params, rng, weights).build();
  });
  const auto y = data.targets();
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  model.target_lo = *lo;
  model.target_hi = *hi;
  return model;
}

ForestModel fit_forest(const WindowedDataset& ds, const ForestParams& params, unsigned threads) {
  if (ds.empty()) fail(ErrorCode::EmptyDataset, "cannot fit a forest on an empty dataset");
  auto model = fit_forest(DesignMatrix::from_dataset(ds), params, threads);
  model.feature_names = ds.feature_names;
  model.target_analyte = ds.analyte;
  model.window_size = ds.window_size;
  model.target_offset = ds.target_offset;
  return model;
}

double predict(const ForestModel& model, std::span<const double> features) {
  if (model.trees.empty()) fail(ErrorCode::UntrainedAnalyte, "model has no trees");
  if (!model.feature_names.empty() && features.size() != model.feature_names.size()) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(model.feature_names.size()) + " features, got " +
                                           std::to_string(features.size()));
  }
  double acc = 0.0;
  for (const auto& tree : model.trees) acc += tree.predict(features);
  return acc / static_cast<double>(model.trees.size());
}

std::vector<double> predict_rows(const ForestModel& model, const DesignMatrix& data) {
  std::vector<double> out(data.rows());
  std::vector<double> row(data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) row[c] = data.x(r, c);
    out[r] = predict(model, row);
  }
  return out;
}

}  // namespace elyte
