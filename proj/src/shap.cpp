#include "cafegb/shap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cafegb/error.hpp"
#include "cafegb/format.hpp"
#include "cafegb/parallel.hpp"

namespace cafegb::shap {

namespace {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

void extend(std::vector<PathElement>& path, std::size_t depth, double zero, double one, int feature) {
  path[depth] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t i = depth; i-- > 0;) {
    path[i + 1].weight += one * path[i].weight * static_cast<double>(i + 1) / d1;
    path[i].weight = zero * path[i].weight * static_cast<double>(depth - i) / d1;
  }
}

void unwind(std::vector<PathElement>& path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next * d1 / (static_cast<double>(i + 1) * one);
      next = tmp - path[i].weight * zero * static_cast<double>(depth - i) / d1;
    } else {
      path[i].weight = path[i].weight * d1 / (zero * static_cast<double>(depth - i));
    }
  }
  for (std::size_t i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_sum(const std::vector<PathElement>& path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  double total = 0.0;
  for (std::size_t i = depth; i-- > 0;) {
    if (one != 0.0) {
      const double tmp = next * d1 / (static_cast<double>(i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * static_cast<double>(depth - i) / d1;
    } else if (zero != 0.0) {
      total += path[i].weight / zero / (static_cast<double>(depth - i) / d1);
    }
  }
  return total;
}

void recurse(const gbdt::Tree& tree, std::size_t node, std::span<const double> x,
             std::span<double> phi, const std::vector<PathElement>& parent, std::size_t depth,
             double zero, double one, int feature) {
  std::vector<PathElement> path(parent.begin(), parent.begin() + static_cast<std::ptrdiff_t>(depth));
  path.resize(depth + 1);
  extend(path, depth, zero, one, feature);
  const auto& n = tree.nodes[node];
  if (n.is_leaf()) {
    for (std::size_t i = 1; i <= depth; ++i) {
      const double w = unwound_sum(path, depth, i);
      const auto& el = path[i];
      phi[static_cast<std::size_t>(el.feature)] += w * (el.one_fraction - el.zero_fraction) * n.value;
    }
    return;
  }
  const auto left = static_cast<std::size_t>(n.left);
  const auto right = static_cast<std::size_t>(n.right);
  const bool go_left = x[static_cast<std::size_t>(n.feature)] <= n.threshold;
  const std::size_t hot = go_left ? left : right;
  const std::size_t cold = go_left ? right : left;
  const double hot_zero = tree.nodes[hot].cover / n.cover;
  const double cold_zero = tree.nodes[cold].cover / n.cover;

  double incoming_zero = 1.0, incoming_one = 1.0;
  std::size_t k = 1;
  for (; k <= depth; ++k) {
    if (path[k].feature == n.feature) break;
  }
  if (k <= depth) {
    incoming_zero = path[k].zero_fraction;
    incoming_one = path[k].one_fraction;
    unwind(path, depth, k);
    --depth;
  }
  recurse(tree, hot, x, phi, path, depth + 1, hot_zero * incoming_zero, incoming_one, n.feature);
  recurse(tree, cold, x, phi, path, depth + 1, cold_zero * incoming_zero, 0.0, n.feature);
}

void check_covers(const gbdt::Tree& tree) {
  for (const auto& n : tree.nodes) {
    if (!(n.cover > 0.0)) throw UsageError("TreeSHAP needs positive node covers; model has none recorded");
  }
}

}  // namespace

double expected_value(const gbdt::Tree& tree) {
  check_covers(tree);
  double total = 0.0;
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) total += n.value * n.cover;
  }
  return total / tree.nodes.front().cover;
}

void tree_shap_single(const gbdt::Tree& tree, std::span<const double> x, std::span<double> phi) {
  if (tree.nodes.empty() || tree.nodes.front().is_leaf()) return;
  check_covers(tree);
  recurse(tree, 0, x, phi, {}, 0, 1.0, 1.0, -1);
}

ShapRow tree_shap(const gbdt::GbdtModel& model, std::span<const double> x) {
  if (x.size() != model.num_features) {
    throw UsageError("row has " + std::to_string(x.size()) + " features, model expects " +
                     std::to_string(model.num_features));
  }
  ShapRow row;
  row.contributions.assign(model.num_features, 0.0);
  row.base_value = model.base_score;
  for (const auto& tree : model.trees) {
    if (tree.nodes.empty()) continue;
    row.base_value += expected_value(tree);
    tree_shap_single(tree, x, row.contributions);
  }
  return row;
}

ShapSummary shap_summary(const gbdt::GbdtModel& model, const Matrix& X, std::size_t top,
                         std::size_t workers, Matrix* values) {
  require(X.rows() > 0, "shap_summary needs at least one row");
  require(X.cols() == model.num_features, "explanation matrix has the wrong feature count");
  const std::size_t m = model.num_features;
  Matrix phi(X.rows(), m);
  parallel_for(X.rows(), workers, [&](std::size_t r) {
    const auto row = tree_shap(model, X.row(r));
    std::copy(row.contributions.begin(), row.contributions.end(), phi.row(r).begin());
  });

  std::vector<ShapFeature> all(m);
  for (std::size_t j = 0; j < m; ++j) {
    double abs_sum = 0.0;
    std::size_t positive = 0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      abs_sum += std::abs(phi(r, j));
      positive += phi(r, j) > 0.0;
    }
    all[j] = {j, abs_sum / static_cast<double>(X.rows()),
              static_cast<double>(positive) / static_cast<double>(X.rows())};
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ShapFeature& a, const ShapFeature& b) { return a.mean_abs > b.mean_abs; });
  all.resize(std::min(top, m));
  if (values) *values = std::move(phi);
  return {std::move(all), X.rows()};
}

std::string summary_to_csv(const ShapSummary& summary, const std::vector<std::string>& names) {
  std::string out = "feature,mean_abs_shap,frac_positive\n";
  for (const auto& f : summary.features) {
    require(f.feature < names.size(), "feature name missing for SHAP summary");
    out += names[f.feature] + "," + format_double(f.mean_abs) + "," + format_double(f.frac_positive) + "\n";
  }
  return out;
}

}  // namespace cafegb::shap
