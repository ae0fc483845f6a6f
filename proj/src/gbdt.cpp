#include "cafegb/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace cafegb::gbdt {

namespace {

constexpr double kProbFloor = 1e-15;
constexpr int kModelFormatVersion = 1;
constexpr std::size_t kDenseRowsPerBin = 8;

struct GradPair {
  double g;
  double h;
};

struct HistBin {
  double g = 0.0;
  double h = 0.0;
  std::uint32_t n = 0;
};

struct SplitCandidate {
  bool valid = false;
  double gain = 0.0;
  std::int32_t feature = -1;
  std::uint32_t bin = 0;
};

struct LeafState {
  std::int32_t node = -1;
  std::size_t begin = 0;
  std::size_t end = 0;
  double g = 0.0;
  double h = 0.0;
  int hist = -1;  // slot in the grower's histogram pool, -1 when not cached
  SplitCandidate best;

  std::size_t count() const noexcept { return end - begin; }
};

// Column-major bin indices for the training matrix.
class BinnedData {
 public:
  BinnedData(const Matrix& X, std::size_t max_bins) : rows_(X.rows()), cols_(X.cols()) {
    bins_.resize(rows_ * cols_);
    cuts_.resize(cols_);
    offsets_.resize(cols_ + 1, 0);
    std::vector<double> column(rows_);
    for (std::size_t f = 0; f < cols_; ++f) {
      for (std::size_t r = 0; r < rows_; ++r) column[r] = X(r, f);
      cuts_[f] = compute_bins(column, max_bins);
      std::uint8_t* out = bins_.data() + f * rows_;
      for (std::size_t r = 0; r < rows_; ++r) out[r] = cuts_[f].bin_of(column[r]);
      offsets_[f + 1] = offsets_[f] + cuts_[f].num_bins();
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t total_bins() const noexcept { return offsets_.back(); }
  std::size_t offset(std::size_t f) const noexcept { return offsets_[f]; }
  std::size_t num_bins(std::size_t f) const noexcept { return cuts_[f].num_bins(); }
  const std::uint8_t* column(std::size_t f) const noexcept { return bins_.data() + f * rows_; }
  double threshold(std::size_t f, std::size_t bin) const { return cuts_[f].thresholds[bin]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> bins_;
  std::vector<FeatureBins> cuts_;
  std::vector<std::size_t> offsets_;
};

class TreeGrower {
 public:
  TreeGrower(const BinnedData& data, const GbdtParams& params)
      : data_(data), params_(params), index_(data.rows()), scratch_(data.rows()),
        scratch_hist_(256), prefix_g_(256), prefix_h_(256), gains_(256) {
    const std::size_t hist_bytes = std::max<std::size_t>(1, data.total_bins() * sizeof(HistBin));
    pool_limit_ = std::max<std::size_t>(1, params.histogram_pool_bytes / hist_bytes);
  }

  // Grows one tree on the current gradients and writes per-row leaf values
  // into `delta`. Returns false when the root admits no split.
  bool grow(std::span<const GradPair> grad, Tree& tree, std::vector<double>& delta) {
    grad_ = grad;
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    nodes_.clear();
    leaves_.clear();
    cached_ = 0;
    free_slots_.clear();
    for (std::size_t i = 0; i < slots_.size(); ++i) free_slots_.push_back(static_cast<int>(i));

    LeafState root;
    root.node = new_node();
    root.begin = 0;
    root.end = data_.rows();
    sum_range(root);
    if (wants_dense(root.count())) root.hist = build_histogram(root);
    root.best = find_split(root);
    leaves_.push_back(root);
    settle(leaves_.back());

    if (!leaves_.front().best.valid) return false;

    while (leaves_.size() < params_.max_leaves) {
      std::size_t pick = leaves_.size();
      for (std::size_t i = 0; i < leaves_.size(); ++i) {
        if (!leaves_[i].best.valid) continue;
        if (pick == leaves_.size() || clearly_greater(leaves_[i].best.gain, leaves_[pick].best.gain)) {
          pick = i;
        }
      }
      if (pick == leaves_.size()) break;
      split_leaf(pick);
    }

    for (const auto& leaf : leaves_) {
      auto& node = nodes_[static_cast<std::size_t>(leaf.node)];
      node.value = -params_.learning_rate * leaf.g / (leaf.h + params_.l2_reg);
      for (std::size_t i = leaf.begin; i < leaf.end; ++i) delta[index_[i]] = node.value;
    }
    tree.nodes = to_preorder();
    return true;
  }

 private:
  std::int32_t new_node() {
    nodes_.emplace_back();
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  void sum_range(LeafState& leaf) {
    double g = 0.0, h = 0.0;
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
      const auto& gp = grad_[index_[i]];
      g += gp.g;
      h += gp.h;
    }
    leaf.g = g;
    leaf.h = h;
    nodes_[static_cast<std::size_t>(leaf.node)].cover = static_cast<double>(leaf.count());
  }

  int acquire_slot() {
    if (free_slots_.empty()) {
      slots_.emplace_back(data_.total_bins());
      return static_cast<int>(slots_.size() - 1);
    }
    const int slot = free_slots_.back();
    free_slots_.pop_back();
    return slot;
  }

  void release(LeafState& leaf) {
    if (leaf.hist < 0) return;
    free_slots_.push_back(leaf.hist);
    leaf.hist = -1;
  }

  std::vector<HistBin>& hist_of(const LeafState& leaf) {
    return slots_[static_cast<std::size_t>(leaf.hist)];
  }

  void gather_gradients(const LeafState& leaf) {
    ordered_.resize(leaf.count());
    for (std::size_t i = 0; i < leaf.count(); ++i) ordered_[i] = grad_[index_[leaf.begin + i]];
  }

  int build_histogram(const LeafState& leaf) {
    const int slot = acquire_slot();
    auto* hist = &slots_[static_cast<std::size_t>(slot)];
    std::fill(hist->begin(), hist->end(), HistBin{});
    const std::size_t count = leaf.count();
    gather_gradients(leaf);
    const std::size_t* rows = index_.data() + leaf.begin;
    for (std::size_t f = 0; f < data_.cols(); ++f) {
      if (data_.num_bins(f) < 2) continue;
      const std::uint8_t* col = data_.column(f);
      HistBin* h = hist->data() + data_.offset(f);
      for (std::size_t i = 0; i < count; ++i) {
        HistBin& b = h[col[rows[i]]];
        b.g += ordered_[i].g;
        b.h += ordered_[i].h;
        ++b.n;
      }
    }
    return slot;
  }

  static void subtract_in_place(std::vector<HistBin>& parent, const std::vector<HistBin>& child) {
    for (std::size_t i = 0; i < parent.size(); ++i) {
      parent[i].g -= child[i].g;
      parent[i].h -= child[i].h;
      parent[i].n -= child[i].n;
    }
  }

  // Leaves at least this large keep a pooled full histogram (and give their
  // larger child one by subtraction); smaller leaves are scanned feature by
  // feature with a single cache-resident scratch histogram.
  bool wants_dense(std::size_t rows) const noexcept {
    return rows >= kDenseRowsPerBin * data_.total_bins() / std::max<std::size_t>(1, data_.cols());
  }

  SplitCandidate find_split(const LeafState& leaf) {
    SplitCandidate best;
    const std::size_t n = leaf.count();
    const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_samples_leaf);
    if (n < 2 * min_leaf) return best;
    const double parent_score = leaf.g * leaf.g / (leaf.h + params_.l2_reg);

    if (leaf.hist >= 0) {
      const auto& hist = hist_of(leaf);
      for (std::size_t f = 0; f < data_.cols(); ++f) {
        if (data_.num_bins(f) < 2) continue;
        scan_feature(leaf, f, hist.data() + data_.offset(f), parent_score, min_leaf, best);
      }
      return best;
    }

    const std::size_t* rows = index_.data() + leaf.begin;
    gather_gradients(leaf);
    for (std::size_t f = 0; f < data_.cols(); ++f) {
      const std::size_t nb = data_.num_bins(f);
      if (nb < 2) continue;
      std::fill(scratch_hist_.begin(), scratch_hist_.begin() + static_cast<std::ptrdiff_t>(nb),
                HistBin{});
      const std::uint8_t* col = data_.column(f);
      for (std::size_t i = 0; i < n; ++i) {
        HistBin& b = scratch_hist_[col[rows[i]]];
        b.g += ordered_[i].g;
        b.h += ordered_[i].h;
        ++b.n;
      }
      scan_feature(leaf, f, scratch_hist_.data(), parent_score, min_leaf, best);
    }
    return best;
  }

  void scan_feature(const LeafState& leaf, std::size_t f, const HistBin* h, double parent_score,
                    std::size_t min_leaf, SplitCandidate& best) {
    const std::size_t cuts = data_.num_bins(f) - 1;
    const std::size_t n = leaf.count();
    // Left-side counts are nondecreasing in the cut position, so the cuts
    // satisfying min_samples_leaf on both sides form one contiguous run.
    double gl = 0.0, hl = 0.0;
    std::size_t nl = 0;
    std::size_t lo = cuts, hi = 0;
    for (std::size_t b = 0; b < cuts; ++b) {
      gl += h[b].g;
      hl += h[b].h;
      nl += h[b].n;
      prefix_g_[b] = gl;
      prefix_h_[b] = hl;
      if (nl >= min_leaf && n - nl >= min_leaf) {
        if (lo == cuts) lo = b;
        hi = b + 1;
      }
    }
    if (lo >= hi) return;

    const double lambda = params_.l2_reg;
    const double total_g = leaf.g;
    const double total_h = leaf.h;
    for (std::size_t b = lo; b < hi; ++b) {
      const double lg = prefix_g_[b];
      const double lh = prefix_h_[b] + lambda;
      const double rg = total_g - lg;
      const double rh = total_h - prefix_h_[b] + lambda;
      const bool ok = lh > 0.0 && rh > 0.0;
      // One division per cut; split_leaf recomputes the recorded gain in the two-term form.
      const double den = ok ? lh * rh : 1.0;
      const double gain = 0.5 * ((lg * lg * rh + rg * rg * lh) / den - parent_score);
      gains_[b] = ok ? gain : -1.0;
    }
    // Leaves whose rows share one gradient have zero true gain but can show
    // rounding-level positive gains; those are not splits.
    const double floor_gain = params_.min_gain_to_split + 0.5e-12 * parent_score;
    for (std::size_t b = lo; b < hi; ++b) {
      const double gain = gains_[b];
      if (!(gain > floor_gain)) continue;
      if (!best.valid || clearly_greater(gain, best.gain)) {
        best.valid = true;
        best.gain = gain;
        best.feature = static_cast<std::int32_t>(f);
        best.bin = static_cast<std::uint32_t>(b);
      }
    }
  }

  double split_gain(const LeafState& leaf, std::size_t feature, std::uint32_t bin) const {
    const std::uint8_t* col = data_.column(feature);
    double lg = 0.0, lh = 0.0;
    for (std::size_t i = leaf.begin; i < leaf.end; ++i) {
      const std::size_t r = index_[i];
      if (col[r] <= bin) {
        lg += grad_[r].g;
        lh += grad_[r].h;
      }
    }
    const double lambda = params_.l2_reg;
    const double rg = leaf.g - lg;
    const double rh = leaf.h - lh;
    return 0.5 * (lg * lg / (lh + lambda) + rg * rg / (rh + lambda) -
                  leaf.g * leaf.g / (leaf.h + lambda));
  }

  // Drops histograms that can no longer be used and enforces the pool bound.
  void settle(LeafState& leaf) {
    if (!leaf.best.valid) {
      release(leaf);
    } else if (leaf.hist >= 0) {
      ++cached_;
    }
    while (cached_ > pool_limit_) {
      std::size_t victim = leaves_.size();
      for (std::size_t i = 0; i < leaves_.size(); ++i) {
        if (leaves_[i].hist < 0) continue;
        if (victim == leaves_.size() || leaves_[i].best.gain < leaves_[victim].best.gain) victim = i;
      }
      if (victim == leaves_.size()) break;
      release(leaves_[victim]);
      --cached_;
    }
  }

  void split_leaf(std::size_t pick) {
    LeafState parent = leaves_[pick];
    if (parent.hist >= 0) --cached_;
    const auto feature = static_cast<std::size_t>(parent.best.feature);
    const std::uint32_t bin = parent.best.bin;

    const std::uint8_t* col = data_.column(feature);
    std::size_t left_end = parent.begin;
    std::size_t spill = 0;
    for (std::size_t i = parent.begin; i < parent.end; ++i) {
      const std::size_t r = index_[i];
      if (col[r] <= bin) {
        index_[left_end++] = r;
      } else {
        scratch_[spill++] = r;
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(spill),
              index_.begin() + static_cast<std::ptrdiff_t>(left_end));

    auto& node = nodes_[static_cast<std::size_t>(parent.node)];
    node.feature = parent.best.feature;
    node.threshold = data_.threshold(feature, bin);
    node.gain = split_gain(parent, feature, bin);

    LeafState left, right;
    left.node = new_node();
    right.node = new_node();
    nodes_[static_cast<std::size_t>(parent.node)].left = left.node;
    nodes_[static_cast<std::size_t>(parent.node)].right = right.node;
    left.begin = parent.begin;
    left.end = left_end;
    right.begin = left_end;
    right.end = parent.end;
    sum_range(left);
    sum_range(right);

    LeafState& small = left.count() <= right.count() ? left : right;
    LeafState& large = left.count() <= right.count() ? right : left;
    if (parent.hist >= 0 && wants_dense(large.count())) {
      small.hist = build_histogram(small);
      large.hist = parent.hist;
      subtract_in_place(hist_of(large), hist_of(small));
    } else {
      release(parent);
      if (wants_dense(large.count())) large.hist = build_histogram(large);
    }
    left.best = find_split(left);
    right.best = find_split(right);

    leaves_[pick] = left;
    leaves_.push_back(right);
    settle(leaves_[pick]);
    settle(leaves_.back());
  }

  std::vector<TreeNode> to_preorder() const {
    std::vector<TreeNode> out;
    out.reserve(nodes_.size());
    std::vector<std::int32_t> stack{0};
    std::vector<std::int32_t> new_id(nodes_.size(), -1);
    std::vector<std::int32_t> order;
    while (!stack.empty()) {
      const auto id = stack.back();
      stack.pop_back();
      new_id[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(order.size());
      order.push_back(id);
      const auto& n = nodes_[static_cast<std::size_t>(id)];
      if (!n.is_leaf()) {
        stack.push_back(n.right);
        stack.push_back(n.left);
      }
    }
    for (auto id : order) {
      TreeNode n = nodes_[static_cast<std::size_t>(id)];
      if (!n.is_leaf()) {
        n.left = new_id[static_cast<std::size_t>(n.left)];
        n.right = new_id[static_cast<std::size_t>(n.right)];
      }
      out.push_back(n);
    }
    return out;
  }

  const BinnedData& data_;
  const GbdtParams& params_;
  std::span<const GradPair> grad_;
  std::vector<std::size_t> index_;
  std::vector<std::size_t> scratch_;
  std::vector<GradPair> ordered_;
  std::vector<HistBin> scratch_hist_;
  std::vector<double> prefix_g_;
  std::vector<double> prefix_h_;
  std::vector<double> gains_;
  std::vector<TreeNode> nodes_;
  std::vector<LeafState> leaves_;
  std::vector<std::vector<HistBin>> slots_;
  std::vector<int> free_slots_;
  std::size_t pool_limit_ = 1;
  std::size_t cached_ = 0;
};

double midpoint(double a, double b) {
  const double mid = a / 2.0 + b / 2.0;
  return (mid >= a && mid < b) ? mid : a;
}

void check_features(const GbdtModel& model, const Matrix& X) {
  if (X.cols() != model.num_features) {
    throw UsageError("model expects " + std::to_string(model.num_features) +
                     " features, input has " + std::to_string(X.cols()));
  }
}

}  // namespace

void GbdtParams::validate() const {
  require(num_rounds >= 1, "num_rounds must be at least 1");
  require(learning_rate > 0.0 && learning_rate <= 1.0, "learning_rate must lie in (0, 1]");
  require(max_leaves >= 2, "max_leaves must be at least 2");
  require(max_bins >= 2 && max_bins <= 255, "max_bins must lie in [2, 255]");
  require(l2_reg >= 0.0, "l2_reg must be nonnegative");
  require(min_gain_to_split >= 0.0, "min_gain_to_split must be nonnegative");
}

std::uint8_t FeatureBins::bin_of(double v) const {
  return static_cast<std::uint8_t>(std::lower_bound(thresholds.begin(), thresholds.end(), v) -
                                   thresholds.begin());
}

FeatureBins compute_bins(std::span<const double> column, std::size_t max_bins) {
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  std::vector<std::size_t> counts;
  for (double v : sorted) {
    if (distinct.empty() || v != distinct.back()) {
      distinct.push_back(v);
      counts.push_back(1);
    } else {
      ++counts.back();
    }
  }
  FeatureBins bins;
  if (distinct.size() <= 1) return bins;
  if (distinct.size() <= max_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      bins.thresholds.push_back(midpoint(distinct[i], distinct[i + 1]));
    }
    return bins;
  }
  const double per_bin = static_cast<double>(sorted.size()) / static_cast<double>(max_bins);
  std::size_t cum = 0;
  std::size_t level = 0;
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    cum += counts[i];
    const auto reached = static_cast<std::size_t>(static_cast<double>(cum) / per_bin);
    if (reached > level) {
      bins.thresholds.push_back(midpoint(distinct[i], distinct[i + 1]));
      level = reached;
      if (bins.thresholds.size() + 1 == max_bins) break;
    }
  }
  return bins;
}

double sigmoid(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

double clamp_probability(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double mean_logloss(std::span<const double> margins, std::span<const std::uint8_t> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double z = margins[i];
    // log(1 + e^z) - y z, evaluated without overflow
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    total += softplus - (y[i] ? z : 0.0);
  }
  return total / static_cast<double>(margins.size());
}

double Tree::predict(std::span<const double> row) const {
  return nodes[leaf_index(row)].value;
}

std::size_t Tree::leaf_index(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                         : n.right);
  }
  return i;
}

double GbdtModel::margin(std::span<const double> row) const {
  double m = base_score;
  for (const auto& t : trees) m += t.predict(row);
  return m;
}

GbdtModel train(const Matrix& X, std::span<const std::uint8_t> y, const GbdtParams& params,
                TrainingTrace* trace) {
  params.validate();
  require(X.rows() > 0 && X.cols() > 0, "training matrix is empty");
  require(y.size() == X.rows(), "label count does not match training rows");

  GbdtModel model;
  model.params = params;
  model.num_features = X.cols();

  const std::size_t n = X.rows();
  const std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  const double prevalence =
      clamp_probability(static_cast<double>(positives) / static_cast<double>(n));
  model.base_score = std::log(prevalence / (1.0 - prevalence));

  std::vector<double> margins(n, model.base_score);
  if (trace) trace->train_logloss.assign(1, mean_logloss(margins, y));
  if (positives == 0 || positives == n) return model;

  const BinnedData binned(X, params.max_bins);
  TreeGrower grower(binned, params);
  std::vector<GradPair> grad(n);
  std::vector<double> delta(n);

  for (std::size_t round = 0; round < params.num_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = clamp_probability(sigmoid(margins[i]));
      grad[i] = {p - static_cast<double>(y[i]), p * (1.0 - p)};
    }
    Tree tree;
    if (!grower.grow(grad, tree, delta)) break;
    for (std::size_t i = 0; i < n; ++i) margins[i] += delta[i];
    model.trees.push_back(std::move(tree));
    if (trace) trace->train_logloss.push_back(mean_logloss(margins, y));
  }
  return model;
}

std::vector<double> predict_margin(const GbdtModel& model, const Matrix& X) {
  check_features(model, X);
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = model.margin(X.row(r));
  return out;
}

std::vector<double> predict_proba(const GbdtModel& model, const Matrix& X) {
  auto out = predict_margin(model, X);
  for (auto& v : out) v = clamp_probability(sigmoid(v));
  return out;
}

ImportanceVector gain_importance(const GbdtModel& model) {
  ImportanceVector imp;
  imp.scores.assign(model.num_features, 0.0);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) imp.scores[static_cast<std::size_t>(node.feature)] += node.gain;
    }
  }
  return imp;
}

std::string model_to_json(const GbdtModel& model) {
  using nlohmann::json;
  const auto& p = model.params;
  json doc;
  doc["format"] = "cafegb-gbdt";
  doc["version"] = kModelFormatVersion;
  doc["params"] = {{"num_rounds", p.num_rounds},       {"learning_rate", p.learning_rate},
                   {"max_leaves", p.max_leaves},       {"min_samples_leaf", p.min_samples_leaf},
                   {"l2_reg", p.l2_reg},               {"max_bins", p.max_bins},
                   {"min_gain_to_split", p.min_gain_to_split}, {"seed", p.seed}};
  doc["base_score"] = model.base_score;
  doc["num_features"] = model.num_features;
  json trees = json::array();
  for (const auto& tree : model.trees) {
    json t;
    for (const char* key : {"feature", "threshold", "left", "right", "gain", "value", "cover"}) {
      t[key] = json::array();
    }
    for (const auto& n : tree.nodes) {
      t["feature"].push_back(n.feature);
      t["threshold"].push_back(n.threshold);
      t["left"].push_back(n.left);
      t["right"].push_back(n.right);
      t["gain"].push_back(n.gain);
      t["value"].push_back(n.value);
      t["cover"].push_back(n.cover);
    }
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc.dump();
}

GbdtModel model_from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  }
  if (doc.value("format", "") != "cafegb-gbdt") throw DataError("not a cafegb-gbdt document");
  if (doc.value("version", 0) != kModelFormatVersion) throw DataError("unsupported model version");
  GbdtModel model;
  try {
    const auto& p = doc.at("params");
    model.params.num_rounds = p.at("num_rounds").get<std::size_t>();
    model.params.learning_rate = p.at("learning_rate").get<double>();
    model.params.max_leaves = p.at("max_leaves").get<std::size_t>();
    model.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    model.params.l2_reg = p.at("l2_reg").get<double>();
    model.params.max_bins = p.at("max_bins").get<std::size_t>();
    model.params.min_gain_to_split = p.at("min_gain_to_split").get<double>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    model.base_score = doc.at("base_score").get<double>();
    model.num_features = doc.at("num_features").get<std::size_t>();
    for (const auto& t : doc.at("trees")) {
      Tree tree;
      const std::size_t count = t.at("feature").size();
      for (std::size_t i = 0; i < count; ++i) {
        TreeNode n;
        n.feature = t.at("feature")[i].get<std::int32_t>();
        n.threshold = t.at("threshold")[i].get<double>();
        n.left = t.at("left")[i].get<std::int32_t>();
        n.right = t.at("right")[i].get<std::int32_t>();
        n.gain = t.at("gain")[i].get<double>();
        n.value = t.at("value")[i].get<double>();
        n.cover = t.at("cover")[i].get<double>();
        tree.nodes.push_back(n);
      }
      model.trees.push_back(std::move(tree));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("model JSON: ") + e.what());
  }
  return model;
}

}  // namespace cafegb::gbdt
