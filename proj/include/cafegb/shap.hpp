#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cafegb/gbdt.hpp"
#include "cafegb/matrix.hpp"

namespace cafegb::shap {

/// Variant stamp written into reports.
inline constexpr const char* kVariant = "path-dependent TreeSHAP (cover-weighted), margin scale";

struct ShapRow {
  std::vector<double> contributions;
  double base_value = 0.0;
};

/// Exact Shapley values of the model margin for one row.
ShapRow tree_shap(const gbdt::GbdtModel& model, std::span<const double> x);
/// Contributions of a single tree (no base score); `phi` is accumulated into.
void tree_shap_single(const gbdt::Tree& tree, std::span<const double> x, std::span<double> phi);
/// Cover-weighted mean leaf value of one tree.
double expected_value(const gbdt::Tree& tree);

struct ShapFeature {
  std::size_t feature = 0;
  double mean_abs = 0.0;
  double frac_positive = 0.0;
};

struct ShapSummary {
  std::vector<ShapFeature> features;  // descending mean_abs, ties by index
  std::size_t rows = 0;
};

ShapSummary shap_summary(const gbdt::GbdtModel& model, const Matrix& X, std::size_t top,
                         std::size_t workers = 1, Matrix* values = nullptr);

std::string summary_to_csv(const ShapSummary& summary, const std::vector<std::string>& names);

}  // namespace cafegb::shap
