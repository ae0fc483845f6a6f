#include "cafegb/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cafegb/error.hpp"
#include "cafegb/format.hpp"
#include "json.hpp"

namespace cafegb::report {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("cannot parse " + what + " value '" + s + "'");
  }
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string raw_metrics_to_json(const RawMetrics& raw) {
  nlohmann::ordered_json doc;
  doc["dataset"] = raw.dataset;
  doc["features"] = raw.features;
  doc["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : raw.runs) {
    const auto& m = run.metrics;
    doc["runs"].push_back({{"classifier", m.classifier},
                           {"feature_set", m.feature_set},
                           {"k", run.k},
                           {"seed", m.seed},
                           {"accuracy", m.accuracy},
                           {"f1", m.f1},
                           {"mcc", m.mcc},
                           {"roc_auc", m.roc_auc},
                           {"pr_auc", m.pr_auc}});
  }
  return doc.dump(1) + "\n";
}

RawMetrics raw_metrics_from_json(const std::string& text) {
  RawMetrics raw;
  try {
    const auto doc = nlohmann::json::parse(text);
    raw.dataset = doc.at("dataset").get<std::string>();
    raw.features = doc.at("features").get<std::size_t>();
    for (const auto& r : doc.at("runs")) {
      RunRecord run;
      run.k = r.at("k").get<std::size_t>();
      run.metrics.classifier = r.at("classifier").get<std::string>();
      run.metrics.feature_set = r.at("feature_set").get<std::string>();
      run.metrics.seed = r.at("seed").get<std::uint64_t>();
      run.metrics.accuracy = r.at("accuracy").get<double>();
      run.metrics.f1 = r.at("f1").get<double>();
      run.metrics.mcc = r.at("mcc").get<double>();
      run.metrics.roc_auc = r.at("roc_auc").get<double>();
      run.metrics.pr_auc = r.at("pr_auc").get<double>();
      raw.runs.push_back(std::move(run));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics JSON: ") + e.what());
  }
  return raw;
}

std::string kscan_to_csv(const std::string& dataset, const analysis::StabilityReport& r) {
  std::string out = "dataset,k,accuracy_mean,accuracy_std,jaccard_stability\n";
  for (const auto& row : r.rows) {
    out += dataset + "," + std::to_string(row.k) + "," + format_double(row.accuracy_mean) + "," +
           format_double(row.accuracy_std) + "," + format_double(row.jaccard_stability) + "\n";
  }
  return out;
}

std::map<std::string, analysis::StabilityReport> kscan_from_csv(const std::string& text) {
  std::map<std::string, analysis::StabilityReport> out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("k-scan CSV is empty");
  const auto header = split_csv_line(line);
  const std::vector<std::string> want = {"dataset", "k", "accuracy_mean", "accuracy_std",
                                         "jaccard_stability"};
  if (header != want) throw DataError("k-scan CSV header must be " + std::string("dataset,k,accuracy_mean,accuracy_std,jaccard_stability"));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != want.size()) {
      throw DataError("k-scan CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells");
    }
    analysis::StabilityRow row;
    const double k = parse_number(cells[1], "k");
    if (k < 1 || k != std::floor(k)) throw DataError("k-scan CSV has invalid k '" + cells[1] + "'");
    row.k = static_cast<std::size_t>(k);
    row.accuracy_mean = parse_number(cells[2], "accuracy_mean");
    row.accuracy_std = parse_number(cells[3], "accuracy_std");
    row.jaccard_stability = parse_number(cells[4], "jaccard_stability");
    out[cells[0]].rows.push_back(row);
  }
  if (out.empty()) throw DataError("k-scan CSV has no rows");
  return out;
}

std::string metrics_to_csv(const RawMetrics& raw) {
  // Group runs by (feature_set, classifier) in first-seen order.
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& run : raw.runs) {
    const std::pair key{run.metrics.feature_set, run.metrics.classifier};
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }
  std::string out = "dataset,method,classifier,k,seeds";
  for (const char* name : eval::kMetricNames) out += std::string(",") + name + "_mean," + name + "_std";
  out += "\n";
  for (const auto& [method, classifier] : groups) {
    std::size_t k = 0, seeds = 0;
    std::vector<std::vector<double>> values(std::size(eval::kMetricNames));
    for (const auto& run : raw.runs) {
      if (run.metrics.feature_set != method || run.metrics.classifier != classifier) continue;
      k = run.k;
      ++seeds;
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i].push_back(eval::metric_value(run.metrics, eval::kMetricNames[i]));
      }
    }
    out += raw.dataset + "," + method + "," + classifier + "," + std::to_string(k) + "," +
           std::to_string(seeds);
    for (const auto& v : values) out += "," + format_double(mean_of(v)) + "," + format_double(std_of(v));
    out += "\n";
  }
  return out;
}

std::string redundancy_to_csv(const std::string& dataset,
                              const std::vector<analysis::RedundancyReport>& rows) {
  std::string out =
      "dataset,k,mean_abs_rho,max_abs_rho,strong_pair_pct,threshold,pairs,strong_pairs,degenerate_pairs\n";
  for (const auto& r : rows) {
    out += dataset + "," + std::to_string(r.k) + "," + format_double(r.mean_abs_rho) + "," +
           format_double(r.max_abs_rho) + "," + format_double(r.strong_pair_pct) + "," +
           format_double(r.threshold) + "," + std::to_string(r.pairs) + "," +
           std::to_string(r.strong_pairs) + "," + std::to_string(r.degenerate_pairs) + "\n";
  }
  return out;
}

std::vector<StatsRow> paired_stats(const RawMetrics& raw) {
  std::vector<std::string> classifiers, methods;
  for (const auto& run : raw.runs) {
    const auto& m = run.metrics;
    if (std::find(classifiers.begin(), classifiers.end(), m.classifier) == classifiers.end()) {
      classifiers.push_back(m.classifier);
    }
    if (m.feature_set != "baseline" &&
        std::find(methods.begin(), methods.end(), m.feature_set) == methods.end()) {
      methods.push_back(m.feature_set);
    }
  }
  std::vector<StatsRow> rows;
  for (const auto& clf : classifiers) {
    std::map<std::uint64_t, const RunRecord*> base;
    for (const auto& run : raw.runs) {
      if (run.metrics.classifier == clf && run.metrics.feature_set == "baseline") {
        base[run.metrics.seed] = &run;
      }
    }
    if (base.empty()) continue;
    for (const auto& method : methods) {
      std::vector<const RunRecord*> b, p;
      for (const auto& run : raw.runs) {
        if (run.metrics.classifier != clf || run.metrics.feature_set != method) continue;
        const auto it = base.find(run.metrics.seed);
        if (it == base.end()) continue;
        b.push_back(it->second);
        p.push_back(&run);
      }
      if (b.size() < 2) continue;
      for (const char* name : eval::kMetricNames) {
        std::vector<double> bv, pv;
        for (std::size_t i = 0; i < b.size(); ++i) {
          bv.push_back(eval::metric_value(b[i]->metrics, name));
          pv.push_back(eval::metric_value(p[i]->metrics, name));
        }
        StatsRow row;
        row.dataset = raw.dataset;
        row.classifier = clf;
        row.metric = name;
        row.baseline_k = b.front()->k;
        row.proposed_k = p.front()->k;
        bool any_diff = false;
        for (std::size_t i = 0; i < bv.size(); ++i) any_diff |= bv[i] != pv[i];
        if (any_diff) {
          row.test = analysis::wilcoxon_signed_rank(bv, pv);
        } else {
          // Identical runs: no evidence of a difference.
          row.test.n_effective = 0;
          row.test.p_two_sided = 1.0;
          row.test.mean_baseline = row.test.mean_proposed = pv.front();
          std::tie(row.test.ci_low, row.test.ci_high) = analysis::t_interval95(pv);
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string stats_to_csv(const std::vector<StatsRow>& rows) {
  std::string out =
      "dataset,classifier,metric,baseline_k,proposed_k,mean_base,mean_prop,ci_low,ci_high,p_value,"
      "method,n_effective,w_plus\n";
  for (const auto& r : rows) {
    const auto& t = r.test;
    out += r.dataset + "," + r.classifier + "," + r.metric + "," + std::to_string(r.baseline_k) +
           "," + std::to_string(r.proposed_k) + "," + format_double(t.mean_baseline) + "," +
           format_double(t.mean_proposed) + "," + format_double(t.ci_low) + "," +
           format_double(t.ci_high) + "," + format_double(t.p_two_sided) + "," +
           (t.n_effective == 0 ? std::string("none") : analysis::method_tag(t.method)) + "," +
           std::to_string(t.n_effective) + "," + format_double(t.w_plus) + "\n";
  }
  return out;
}

}  // namespace cafegb::report
