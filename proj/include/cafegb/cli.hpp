#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cafegb/data.hpp"
#include "cafegb/gbdt.hpp"
#include "cafegb/logreg.hpp"

namespace cafegb::cli {

struct RunConfig {
  std::string data;  // CSV or binary cache; empty means generate from the synthetic spec
  std::string label_column = "label";
  std::string dataset;  // report tag; defaults to the data file stem or "synthetic"
  data::SyntheticSpec synth;
  std::size_t chunk_size = 15000;
  double overlap = 0.1;
  bool normalize_chunks = false;
  gbdt::GbdtParams gbdt;
  eval::LogRegParams logreg;
  std::vector<std::size_t> k_grid{50, 100, 200, 300};
  std::vector<std::uint64_t> seeds{42, 52, 62, 72, 82};
  std::vector<std::string> classifiers{"gbdt", "logreg"};
  std::string kscan_classifier = "gbdt";
  double delta = 0.001;
  double rho_threshold = 0.8;
  std::size_t k = 0;  // 0: take the budget chosen by kscan, else 100
  double test_fraction = 0.2;
  std::size_t shap_top = 20;
  std::size_t shap_rows = 1000;
  bool shap_values = false;
  std::size_t workers = 1;
  std::string output = "cafegb-out";
  std::string replay;         // kscan: re-emit an existing k-scan CSV
  std::string metrics_input;  // stats: per-seed metrics JSON
  std::string convert_in;
  std::string convert_out;
  bool quiet = false;
};

/// One configurable key, shared by flags, config files and config.effective.
struct Setting {
  std::string key;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  std::string env;  // environment override, if any
};

const std::vector<Setting>& settings();

/// Applies `key = value` lines; '#' starts a comment. Unknown keys are usage errors.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin);
std::string effective_config(const RunConfig& cfg);

/// Entry point used by the executable; returns the process exit code.
int run(int argc, char** argv);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

}  // namespace cafegb::cli
