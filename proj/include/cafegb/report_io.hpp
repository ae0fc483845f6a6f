#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cafegb/analysis.hpp"
#include "cafegb/metrics.hpp"

namespace cafegb::report {

/// One downstream run as stored in metrics_raw.json.
struct RunRecord {
  eval::MetricsReport metrics;
  std::size_t k = 0;  // features the classifier saw
};

struct RawMetrics {
  std::string dataset;
  std::size_t features = 0;
  std::vector<RunRecord> runs;
};

std::string raw_metrics_to_json(const RawMetrics& raw);
RawMetrics raw_metrics_from_json(const std::string& text);

/// dataset,k,accuracy_mean,accuracy_std,jaccard_stability
std::string kscan_to_csv(const std::string& dataset, const analysis::StabilityReport& r);
/// Parses kscan_to_csv output (any number of datasets), keyed by dataset.
std::map<std::string, analysis::StabilityReport> kscan_from_csv(const std::string& text);

/// dataset,method,classifier,<metric>_mean,<metric>_std for the five metrics.
std::string metrics_to_csv(const RawMetrics& raw);

std::string redundancy_to_csv(const std::string& dataset,
                              const std::vector<analysis::RedundancyReport>& rows);

struct StatsRow {
  std::string dataset;
  std::string classifier;
  std::string metric;
  std::size_t baseline_k = 0;
  std::size_t proposed_k = 0;
  analysis::WilcoxonResult test;
};

/// Pairs every cafegb-k run set with the baseline of the same classifier by seed.
std::vector<StatsRow> paired_stats(const RawMetrics& raw);
std::string stats_to_csv(const std::vector<StatsRow>& rows);

/// Splits one CSV line on commas (no quoting; the toolkit never writes quotes).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace cafegb::report
