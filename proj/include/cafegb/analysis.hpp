#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cafegb/experiment.hpp"
#include "cafegb/matrix.hpp"

namespace cafegb::analysis {

using IndexSet = std::vector<std::size_t>;

/// |a ∩ b| / |a ∪ b|. Inputs need not be sorted; duplicates are ignored.
double jaccard(const IndexSet& a, const IndexSet& b);
/// Mean Jaccard over all unordered pairs.
double stability(const std::vector<IndexSet>& sets);

struct StabilityRow {
  std::size_t k = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // sample standard deviation across seeds
  double jaccard_stability = 0.0;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
};

struct KScanResult {
  StabilityReport report;
  /// accuracy[s][i]: seed s, k_grid[i].
  std::vector<std::vector<double>> accuracy;
  std::vector<selection::FeatureRanking> rankings;  // seed order
};

KScanResult kscan(const data::DatasetMatrix& ds, const std::vector<std::size_t>& k_grid,
                  const std::vector<std::uint64_t>& seeds, const eval::ExperimentConfig& cfg,
                  eval::Classifier classifier);

/// Among rows with accuracy_mean >= max - delta, the highest stability; ties go
/// to the smaller k.
std::size_t select_budget(const StabilityReport& report, double delta);

struct Correlation {
  double rho = 0.0;
  bool degenerate = false;  // a zero-variance input; rho is reported as 0
};

Correlation pearson(std::span<const double> x, std::span<const double> y);

struct RedundancyReport {
  std::size_t k = 0;
  double mean_abs_rho = 0.0;
  double max_abs_rho = 0.0;
  double strong_pair_pct = 0.0;
  double threshold = 0.8;
  std::size_t pairs = 0;
  std::size_t strong_pairs = 0;
  std::size_t degenerate_pairs = 0;
};

/// Pairwise |rho| over the columns in `subset`; strong means |rho| > threshold.
RedundancyReport correlation_stats(const Matrix& X, const IndexSet& subset, double threshold);

enum class WilcoxonMethod { kExact, kNormal };

struct WilcoxonResult {
  std::size_t n_effective = 0;
  double w_plus = 0.0;
  double p_two_sided = 1.0;
  WilcoxonMethod method = WilcoxonMethod::kExact;
  /// Exact path only: p = p_numerator / p_denominator with p_denominator = 2^n.
  std::uint64_t p_numerator = 0;
  std::uint64_t p_denominator = 0;
  double mean_baseline = 0.0;
  double mean_proposed = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Differences are proposed - baseline; zeros are dropped. Exact enumeration
/// over sign assignments of the midranks when at most kWilcoxonExactLimit
/// nonzero differences remain, otherwise the tie-corrected normal approximation.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> baseline,
                                    std::span<const double> proposed);
inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// Student-t 95% interval for the mean of `values`.
std::pair<double, double> t_interval95(std::span<const double> values);

std::string method_tag(WilcoxonMethod m);

}  // namespace cafegb::analysis
