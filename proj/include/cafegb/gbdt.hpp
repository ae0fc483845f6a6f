#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cafegb/matrix.hpp"

namespace cafegb::gbdt {

/// Booster settings. Defaults follow LightGBM's stock configuration.
struct GbdtParams {
  std::size_t num_rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_leaves = 31;
  std::size_t min_samples_leaf = 20;
  double l2_reg = 0.0;
  std::size_t max_bins = 255;
  double min_gain_to_split = 0.0;
  std::uint64_t seed = 0;  // reserved; training has no stochastic component
  /// Upper bound on memory held by cached leaf histograms.
  std::size_t histogram_pool_bytes = std::size_t{128} << 20;

  void validate() const;
};

/// Internal nodes have left >= 0. Rows with value <= threshold go left.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double gain = 0.0;
  double value = 0.0;  // leaf log-odds increment (0 for internal nodes)
  double cover = 0.0;  // training rows routed through this node

  bool is_leaf() const noexcept { return left < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Nodes in pre-order; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const;
  std::size_t leaf_index(std::span<const double> row) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct GbdtModel {
  double base_score = 0.0;
  std::vector<Tree> trees;
  GbdtParams params;
  std::size_t num_features = 0;

  double margin(std::span<const double> row) const;
};

struct ImportanceVector {
  std::vector<double> scores;
  friend bool operator==(const ImportanceVector&, const ImportanceVector&) = default;
};

/// Optional per-round diagnostics.
struct TrainingTrace {
  /// Mean training log-loss; entry 0 is the base-score model, entry r follows round r.
  std::vector<double> train_logloss;
};

/// Equal-frequency cut points of one feature. Bin b holds values in
/// (thresholds[b-1], thresholds[b]]; anything above the last cut is in the last bin.
struct FeatureBins {
  std::vector<double> thresholds;
  std::size_t num_bins() const noexcept { return thresholds.size() + 1; }
  std::uint8_t bin_of(double v) const;
};

FeatureBins compute_bins(std::span<const double> column, std::size_t max_bins);

GbdtModel train(const Matrix& X, std::span<const std::uint8_t> y, const GbdtParams& params,
                TrainingTrace* trace = nullptr);

std::vector<double> predict_margin(const GbdtModel& model, const Matrix& X);
std::vector<double> predict_proba(const GbdtModel& model, const Matrix& X);

ImportanceVector gain_importance(const GbdtModel& model);

double sigmoid(double margin);
double clamp_probability(double p);
double mean_logloss(std::span<const double> margins, std::span<const std::uint8_t> y);

/// Versioned JSON document: params, base_score, per-tree pre-order node arrays.
std::string model_to_json(const GbdtModel& model);
GbdtModel model_from_json(std::string_view text);

/// True when `candidate` beats `incumbent` by more than floating-point noise.
/// Split search and leaf selection share this rule, so near-equal gains resolve
/// to the earlier candidate (lower feature index, then lower threshold).
inline bool clearly_greater(double candidate, double incumbent) {
  const double mag = incumbent < 0 ? -incumbent : incumbent;
  return candidate > incumbent + 1e-12 * mag;
}

}  // namespace cafegb::gbdt
