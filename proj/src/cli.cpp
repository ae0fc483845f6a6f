#include "cafegb/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cafegb/analysis.hpp"
#include "cafegb/error.hpp"
#include "cafegb/experiment.hpp"
#include "cafegb/format.hpp"
#include "cafegb/profiler.hpp"
#include "cafegb/report_io.hpp"
#include "cafegb/selector.hpp"
#include "cafegb/shap.hpp"

namespace cafegb::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  const auto t = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw UsageError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

std::size_t parse_count(const std::string& v, const std::string& key) {
  return static_cast<std::size_t>(parse_u64(v, key));
}

double parse_real(const std::string& v, const std::string& key) {
  const auto t = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw UsageError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  const auto t = trim(v);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(v);
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& v, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

std::string str_count(std::size_t v) { return std::to_string(v); }
std::string str_bool(bool v) { return v ? "true" : "false"; }

using Cfg = RunConfig;

std::vector<Setting> build_settings() {
  std::vector<Setting> s;
  auto add = [&](std::string key, std::string help, auto set, auto get, std::string env = "") {
    s.push_back({std::move(key), std::move(help), set, get, std::move(env)});
  };
  add("data", "Input CSV or binary cache; empty generates the synthetic dataset",
      [](Cfg& c, const std::string& v) { c.data = trim(v); }, [](const Cfg& c) { return c.data; });
  add("label-column", "Name of the 0/1 label column (default: label)",
      [](Cfg& c, const std::string& v) { c.label_column = trim(v); },
      [](const Cfg& c) { return c.label_column; });
  add("dataset", "Dataset tag used in reports (default: data file stem or 'synthetic')",
      [](Cfg& c, const std::string& v) { c.dataset = trim(v); },
      [](const Cfg& c) { return c.dataset; });
  add("output", "Output directory (default: cafegb-out)",
      [](Cfg& c, const std::string& v) { c.output = trim(v); },
      [](const Cfg& c) { return c.output; }, "CAFEGB_OUTPUT_DIR");
  add("workers", "Worker threads; 0 uses every core; never changes outputs (default: 1)",
      [](Cfg& c, const std::string& v) { c.workers = parse_count(v, "workers"); },
      [](const Cfg& c) { return str_count(c.workers); }, "CAFEGB_WORKERS");

  add("n", "Synthetic rows (default: 1000)",
      [](Cfg& c, const std::string& v) { c.synth.n = parse_count(v, "n"); },
      [](const Cfg& c) { return str_count(c.synth.n); });
  add("m", "Synthetic features (default: 50)",
      [](Cfg& c, const std::string& v) { c.synth.m = parse_count(v, "m"); },
      [](const Cfg& c) { return str_count(c.synth.m); });
  add("d", "Synthetic informative features (default: 5)",
      [](Cfg& c, const std::string& v) { c.synth.d_informative = parse_count(v, "d"); },
      [](const Cfg& c) { return str_count(c.synth.d_informative); });
  add("seed", "Synthetic generator seed (default: 42)",
      [](Cfg& c, const std::string& v) { c.synth.seed = parse_u64(v, "seed"); },
      [](const Cfg& c) { return std::to_string(c.synth.seed); });
  add("noise", "Synthetic label-flip probability in [0, 0.5) (default: 0)",
      [](Cfg& c, const std::string& v) { c.synth.label_noise = parse_real(v, "noise"); },
      [](const Cfg& c) { return format_double(c.synth.label_noise); });
  add("duplicates", "Synthetic duplicated feature columns (default: 0)",
      [](Cfg& c, const std::string& v) { c.synth.duplicate_pairs = parse_count(v, "duplicates"); },
      [](const Cfg& c) { return str_count(c.synth.duplicate_pairs); });

  add("chunk-size", "Rows per chunk (reference default: 15000)",
      [](Cfg& c, const std::string& v) { c.chunk_size = parse_count(v, "chunk-size"); },
      [](const Cfg& c) { return str_count(c.chunk_size); });
  add("overlap", "Overlap ratio between consecutive chunks (reference default: 0.1)",
      [](Cfg& c, const std::string& v) { c.overlap = parse_real(v, "overlap"); },
      [](const Cfg& c) { return format_double(c.overlap); });
  add("normalize-chunks", "L1-normalize each chunk's importances before summing (default: false)",
      [](Cfg& c, const std::string& v) { c.normalize_chunks = parse_bool(v, "normalize-chunks"); },
      [](const Cfg& c) { return str_bool(c.normalize_chunks); });

  add("rounds", "Boosting rounds (reference default: 100)",
      [](Cfg& c, const std::string& v) { c.gbdt.num_rounds = parse_count(v, "rounds"); },
      [](const Cfg& c) { return str_count(c.gbdt.num_rounds); });
  add("learning-rate", "Boosting learning rate (reference default: 0.1)",
      [](Cfg& c, const std::string& v) { c.gbdt.learning_rate = parse_real(v, "learning-rate"); },
      [](const Cfg& c) { return format_double(c.gbdt.learning_rate); });
  add("max-leaves", "Leaves per tree (reference default: 31)",
      [](Cfg& c, const std::string& v) { c.gbdt.max_leaves = parse_count(v, "max-leaves"); },
      [](const Cfg& c) { return str_count(c.gbdt.max_leaves); });
  add("min-samples-leaf", "Minimum rows per leaf (reference default: 20)",
      [](Cfg& c, const std::string& v) {
        c.gbdt.min_samples_leaf = parse_count(v, "min-samples-leaf");
      },
      [](const Cfg& c) { return str_count(c.gbdt.min_samples_leaf); });
  add("l2", "Leaf L2 regularization lambda (reference default: 0)",
      [](Cfg& c, const std::string& v) { c.gbdt.l2_reg = parse_real(v, "l2"); },
      [](const Cfg& c) { return format_double(c.gbdt.l2_reg); });
  add("max-bins", "Histogram bins per feature, at most 255 (reference default: 255)",
      [](Cfg& c, const std::string& v) { c.gbdt.max_bins = parse_count(v, "max-bins"); },
      [](const Cfg& c) { return str_count(c.gbdt.max_bins); });
  add("min-gain", "Minimum split gain (reference default: 0)",
      [](Cfg& c, const std::string& v) { c.gbdt.min_gain_to_split = parse_real(v, "min-gain"); },
      [](const Cfg& c) { return format_double(c.gbdt.min_gain_to_split); });

  add("logreg-l2", "Logistic regression L2 penalty (default: 0.0001)",
      [](Cfg& c, const std::string& v) { c.logreg.l2 = parse_real(v, "logreg-l2"); },
      [](const Cfg& c) { return format_double(c.logreg.l2); });
  add("logreg-max-iters", "Logistic regression iterations (default: 500)",
      [](Cfg& c, const std::string& v) { c.logreg.max_iters = parse_count(v, "logreg-max-iters"); },
      [](const Cfg& c) { return str_count(c.logreg.max_iters); });
  add("logreg-tol", "Logistic regression gradient-norm tolerance (default: 1e-06)",
      [](Cfg& c, const std::string& v) { c.logreg.tol = parse_real(v, "logreg-tol"); },
      [](const Cfg& c) { return format_double(c.logreg.tol); });

  add("seeds", "Comma-separated run seeds (reference default: 42,52,62,72,82)",
      [](Cfg& c, const std::string& v) {
        c.seeds.clear();
        for (const auto& x : parse_list(v)) c.seeds.push_back(parse_u64(x, "seeds"));
        require(!c.seeds.empty(), "seeds: need at least one seed");
      },
      [](const Cfg& c) { return join(c.seeds, [](auto x) { return std::to_string(x); }); });
  add("k-grid", "Comma-separated feature budgets (reference default: 50,100,200,300)",
      [](Cfg& c, const std::string& v) {
        c.k_grid.clear();
        for (const auto& x : parse_list(v)) c.k_grid.push_back(parse_count(x, "k-grid"));
        require(!c.k_grid.empty(), "k-grid: need at least one budget");
      },
      [](const Cfg& c) { return join(c.k_grid, str_count); });
  add("classifiers", "Comma-separated downstream classifiers: gbdt, logreg (default: gbdt,logreg)",
      [](Cfg& c, const std::string& v) {
        c.classifiers = parse_list(v);
        require(!c.classifiers.empty(), "classifiers: need at least one");
        for (const auto& x : c.classifiers) eval::parse_classifier(x);
      },
      [](const Cfg& c) { return join(c.classifiers, [](const std::string& x) { return x; }); });
  add("kscan-classifier", "Classifier scored during the k-scan (default: gbdt)",
      [](Cfg& c, const std::string& v) {
        c.kscan_classifier = trim(v);
        eval::parse_classifier(c.kscan_classifier);
      },
      [](const Cfg& c) { return c.kscan_classifier; });
  add("delta", "Accuracy tolerance of the budget rule (default: 0.001)",
      [](Cfg& c, const std::string& v) { c.delta = parse_real(v, "delta"); },
      [](const Cfg& c) { return format_double(c.delta); });
  add("rho-threshold", "Strong-correlation threshold on |rho| (reference default: 0.8)",
      [](Cfg& c, const std::string& v) { c.rho_threshold = parse_real(v, "rho-threshold"); },
      [](const Cfg& c) { return format_double(c.rho_threshold); });
  add("k", "Feature budget for evaluate/redundancy/shap; 0 takes the k-scan choice, else 100 "
           "(reference default: 100)",
      [](Cfg& c, const std::string& v) { c.k = parse_count(v, "k"); },
      [](const Cfg& c) { return str_count(c.k); });
  add("test-fraction", "Held-out fraction of the stratified split (reference default: 0.2)",
      [](Cfg& c, const std::string& v) { c.test_fraction = parse_real(v, "test-fraction"); },
      [](const Cfg& c) { return format_double(c.test_fraction); });
  add("shap-top", "Features kept in the SHAP summary (reference default: 20)",
      [](Cfg& c, const std::string& v) { c.shap_top = parse_count(v, "shap-top"); },
      [](const Cfg& c) { return str_count(c.shap_top); });
  add("shap-rows", "Test rows explained, 0 for all (default: 1000)",
      [](Cfg& c, const std::string& v) { c.shap_rows = parse_count(v, "shap-rows"); },
      [](const Cfg& c) { return str_count(c.shap_rows); });
  add("shap-values", "Also write per-row SHAP values to shap_values.csv (default: false)",
      [](Cfg& c, const std::string& v) { c.shap_values = parse_bool(v, "shap-values"); },
      [](const Cfg& c) { return str_bool(c.shap_values); });
  add("replay", "kscan: re-emit this k-scan CSV instead of computing one",
      [](Cfg& c, const std::string& v) { c.replay = trim(v); },
      [](const Cfg& c) { return c.replay; });
  add("metrics-input", "stats: per-seed metrics JSON (default: <output>/metrics_raw.json)",
      [](Cfg& c, const std::string& v) { c.metrics_input = trim(v); },
      [](const Cfg& c) { return c.metrics_input; });
  add("in", "convert: source file (.csv or .cafe)",
      [](Cfg& c, const std::string& v) { c.convert_in = trim(v); },
      [](const Cfg& c) { return c.convert_in; });
  add("out", "convert: destination file (.csv or .cafe)",
      [](Cfg& c, const std::string& v) { c.convert_out = trim(v); },
      [](const Cfg& c) { return c.convert_out; });
  return s;
}

// ---------------------------------------------------------------------------

class Logger {
 public:
  explicit Logger(bool quiet) : quiet_(quiet) {}
  void info(const std::string& msg) const {
    if (!quiet_) std::cerr << "cafegb: " << msg << "\n";
  }
  void warn(const std::string& msg) const { std::cerr << "cafegb: warning: " << msg << "\n"; }

 private:
  bool quiet_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_cache(const fs::path& p) { return p.extension() == ".cafe"; }

struct Session {
  RunConfig cfg;
  fs::path out;
  Logger log{false};
  profiler::Recorder profile;
  std::optional<data::DatasetMatrix> ds;
  std::string tag;

  const data::DatasetMatrix& dataset() {
    if (ds) return *ds;
    if (cfg.data.empty()) {
      log.info("no --data given; generating synthetic data (n=" + std::to_string(cfg.synth.n) +
               ", m=" + std::to_string(cfg.synth.m) + ", d=" +
               std::to_string(cfg.synth.d_informative) + ")");
      ds = data::generate_synthetic(cfg.synth).dataset;
      tag = cfg.dataset.empty() ? "synthetic" : cfg.dataset;
    } else {
      const fs::path p(cfg.data);
      ds = is_cache(p) ? data::read_cache(p) : data::load_csv(p, cfg.label_column);
      tag = cfg.dataset.empty() ? p.stem().string() : cfg.dataset;
      log.info("loaded " + p.string() + ": " + std::to_string(ds->rows()) + " rows, " +
               std::to_string(ds->features()) + " features");
      if (!ds->missing.empty()) {
        log.info(std::to_string(ds->missing.size()) +
                 " missing cells; imputed with training-row medians per split");
      }
    }
    return *ds;
  }

  const std::string& dataset_tag() {
    dataset();
    return tag;
  }

  eval::ExperimentConfig experiment() const {
    eval::ExperimentConfig e;
    e.test_fraction = cfg.test_fraction;
    e.cafegb.chunk_size = cfg.chunk_size;
    e.cafegb.overlap = cfg.overlap;
    e.cafegb.gbdt = cfg.gbdt;
    e.cafegb.normalize_chunks = cfg.normalize_chunks;
    e.cafegb.workers = cfg.workers;
    e.gbdt = cfg.gbdt;
    e.logreg = cfg.logreg;
    return e;
  }

  fs::path artifact(const std::string& name) const { return out / name; }

  // Loads an artifact that an earlier command produces, naming that command when absent.
  std::string upstream(const std::string& name, const std::string& producer) const {
    const auto p = artifact(name);
    if (!fs::exists(p)) {
      throw DataError(p.string() + " not found; run `cafegb " + producer + "` first");
    }
    return read_text(p);
  }

  // Feature budget: explicit --k, else the k-scan choice, else 100; capped at m.
  std::size_t budget() {
    const std::size_t m = dataset().features();
    if (cfg.k > 0) {
      require(cfg.k <= m, "k=" + std::to_string(cfg.k) + " exceeds " + std::to_string(m) + " features");
      return cfg.k;
    }
    const auto p = artifact("budget.json");
    if (fs::exists(p)) {
      const auto doc = nlohmann::json::parse(read_text(p), nullptr, false);
      if (!doc.is_discarded() && doc.contains("selected") && doc["selected"].contains(dataset_tag())) {
        return std::min<std::size_t>(doc["selected"][dataset_tag()].get<std::size_t>(), m);
      }
    }
    return std::min<std::size_t>(100, m);
  }

  void validate() const {
    require(cfg.chunk_size >= 2, "chunk-size must be at least 2");
    require(cfg.overlap >= 0.0 && cfg.overlap < 1.0, "overlap must lie in [0, 1)");
    require(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0, "test-fraction must lie in (0, 1)");
    require(cfg.delta >= 0.0, "delta must be nonnegative");
    require(cfg.rho_threshold >= 0.0 && cfg.rho_threshold <= 1.0, "rho-threshold must lie in [0, 1]");
    cfg.gbdt.validate();
    cfg.logreg.validate();
  }

  void finish_profile() {
    if (!profile.records().empty()) write_text(artifact("profile.csv"), profile.to_csv());
  }
};

eval::SeedContext prepare(Session& s, std::uint64_t seed) {
  auto ctx = eval::prepare_seed(s.dataset(), seed, s.cfg.test_fraction);
  if (s.cfg.chunk_size > ctx.train.rows()) {
    s.log.warn("chunk size " + std::to_string(s.cfg.chunk_size) + " exceeds " +
               std::to_string(ctx.train.rows()) + " training rows; using a single chunk");
  }
  return ctx;
}

selection::FeatureRanking load_ranking(Session& s) {
  return selection::ranking_from_json(s.upstream("ranking.json", "select"),
                                      s.dataset().feature_names);
}

// ---------------------------------------------------------------------------

void cmd_synth(Session& s) {
  const auto syn = data::generate_synthetic(s.cfg.synth);
  data::write_csv(syn.dataset, s.artifact("synthetic.csv"), "label");
  nlohmann::ordered_json doc;
  doc["n"] = s.cfg.synth.n;
  doc["m"] = s.cfg.synth.m;
  doc["d_informative"] = s.cfg.synth.d_informative;
  doc["seed"] = s.cfg.synth.seed;
  doc["label_noise"] = s.cfg.synth.label_noise;
  doc["planted"] = syn.planted;
  std::vector<std::string> names;
  for (auto j : syn.planted) names.push_back(syn.dataset.feature_names[j]);
  doc["planted_names"] = names;
  doc["duplicates"] = nlohmann::ordered_json::array();
  for (const auto& [src, copy] : syn.duplicates) doc["duplicates"].push_back({src, copy});
  write_text(s.artifact("planted.json"), doc.dump(1) + "\n");
  s.log.info("wrote synthetic.csv (" + std::to_string(syn.dataset.rows()) + " rows) and planted.json");
}

void cmd_select(Session& s) {
  const auto& ds = s.dataset();
  const std::uint64_t seed = s.cfg.seeds.front();
  const auto ctx = prepare(s, seed);
  selection::RunTrace trace;
  selection::FeatureRanking ranking;
  auto sel = s.experiment().cafegb;
  sel.seed = seed;
  s.profile.add(profiler::profile_stage("cafegb", s.dataset_tag(), seed, [&] {
    ranking = selection::run(ctx.train, sel, &trace);
  }));
  const auto single = std::count(trace.single_class.begin(), trace.single_class.end(), true);
  s.log.info("CAFE-GB over " + std::to_string(trace.plan.windows.size()) + " chunk(s) of " +
             std::to_string(ctx.train.rows()) + " training rows" +
             (single ? ", " + std::to_string(single) + " single-class" : std::string()));
  write_text(s.artifact("ranking.json"), selection::ranking_to_json(ranking, ds.feature_names));
  write_text(s.artifact("importance.csv"),
             selection::importance_to_csv(ranking.aggregated, ds.feature_names));
  write_text(s.artifact("chunk_plan.json"), chunker::plan_to_json(trace.plan) + "\n");
}

void write_budget(Session& s, const std::map<std::string, std::size_t>& chosen) {
  nlohmann::ordered_json doc;
  doc["delta"] = s.cfg.delta;
  doc["rule"] = "max jaccard stability among budgets within delta of the best mean accuracy";
  doc["selected"] = nlohmann::ordered_json::object();
  for (const auto& [name, k] : chosen) doc["selected"][name] = k;
  write_text(s.artifact("budget.json"), doc.dump(1) + "\n");
}

void cmd_kscan(Session& s) {
  std::map<std::string, std::size_t> chosen;
  std::string csv;
  if (!s.cfg.replay.empty()) {
    const auto text = read_text(s.cfg.replay);
    const auto reports = report::kscan_from_csv(text);
    bool header = true;
    for (const auto& [name, rep] : reports) {
      auto block = report::kscan_to_csv(name, rep);
      if (!header) block.erase(0, block.find('\n') + 1);
      csv += block;
      header = false;
      chosen[name] = analysis::select_budget(rep, s.cfg.delta);
      s.log.info(name + ": budget rule selects k=" + std::to_string(chosen[name]));
    }
  } else {
    const auto cls = eval::parse_classifier(s.cfg.kscan_classifier);
    analysis::KScanResult res;
    s.profile.add(profiler::profile_stage("kscan", s.dataset_tag(), s.cfg.seeds.front(), [&] {
      res = analysis::kscan(s.dataset(), s.cfg.k_grid, s.cfg.seeds, s.experiment(), cls);
    }));
    csv = report::kscan_to_csv(s.dataset_tag(), res.report);
    chosen[s.dataset_tag()] = analysis::select_budget(res.report, s.cfg.delta);
    s.log.info("budget rule selects k=" + std::to_string(chosen[s.dataset_tag()]));
  }
  write_text(s.artifact("kscan.csv"), csv);
  write_budget(s, chosen);
}

void cmd_evaluate(Session& s) {
  const auto& ds = s.dataset();
  const std::size_t k = s.budget();
  std::vector<eval::Classifier> classifiers;
  for (const auto& c : s.cfg.classifiers) classifiers.push_back(eval::parse_classifier(c));
  const auto exp = s.experiment();
  report::RawMetrics raw;
  raw.dataset = s.dataset_tag();
  raw.features = ds.features();
  std::vector<report::RunRecord> base_runs, prop_runs;
  for (const auto seed : s.cfg.seeds) {
    const auto ctx = prepare(s, seed);
    selection::FeatureRanking ranking;
    s.profile.add(profiler::profile_stage("cafegb", s.dataset_tag(), seed,
                                          [&] { ranking = eval::select_features(ctx, exp); }));
    const auto cols = selection::top_k(ranking, k);
    s.profile.add(profiler::profile_stage("classification", s.dataset_tag(), seed, [&] {
      for (const auto cls : classifiers) {
        auto b = eval::fit_and_score(ctx, {}, cls, exp);
        b.feature_set = eval::FeatureSet::all().tag();
        base_runs.push_back({b, ds.features()});
        auto p = eval::fit_and_score(ctx, cols, cls, exp);
        p.feature_set = eval::FeatureSet::cafegb(k).tag();
        prop_runs.push_back({p, k});
      }
    }));
    s.log.info("seed " + std::to_string(seed) + " evaluated");
  }
  // Baseline rows first, then the selected subset, each in seed order per classifier.
  for (const auto cls : classifiers) {
    for (const auto& r : base_runs) {
      if (r.metrics.classifier == eval::classifier_tag(cls)) raw.runs.push_back(r);
    }
    for (const auto& r : prop_runs) {
      if (r.metrics.classifier == eval::classifier_tag(cls)) raw.runs.push_back(r);
    }
  }
  write_text(s.artifact("metrics_raw.json"), report::raw_metrics_to_json(raw));
  write_text(s.artifact("metrics.csv"), report::metrics_to_csv(raw));
}

void cmd_stats(Session& s) {
  std::string text;
  if (!s.cfg.metrics_input.empty()) {
    text = read_text(s.cfg.metrics_input);
  } else {
    text = s.upstream("metrics_raw.json", "evaluate");
  }
  const auto raw = report::raw_metrics_from_json(text);
  const auto rows = report::paired_stats(raw);
  if (rows.empty()) throw DataError("metrics have no baseline/selected pairs to compare");
  write_text(s.artifact("stats.csv"), report::stats_to_csv(rows));
}

void cmd_redundancy(Session& s) {
  const auto ranking = load_ranking(s);
  const std::size_t m = s.dataset().features();
  std::set<std::size_t> ks;
  for (auto k : s.cfg.k_grid) {
    if (k >= 2 && k <= m) ks.insert(k);
  }
  if (const auto k = s.budget(); k >= 2) ks.insert(k);
  require(!ks.empty(), "no feature budget of at least 2 fits the dataset");
  const auto ctx = prepare(s, s.cfg.seeds.front());
  std::vector<analysis::RedundancyReport> rows;
  for (auto k : ks) {
    rows.push_back(analysis::correlation_stats(ctx.train.values, selection::top_k(ranking, k),
                                               s.cfg.rho_threshold));
  }
  write_text(s.artifact("redundancy.csv"), report::redundancy_to_csv(s.dataset_tag(), rows));
}

void cmd_shap(Session& s) {
  const auto ranking = load_ranking(s);
  const std::size_t k = s.budget();
  const std::uint64_t seed = s.cfg.seeds.front();
  const auto ctx = prepare(s, seed);
  const auto cols = selection::top_k(ranking, k);
  const auto train = data::select_columns(ctx.train, cols);
  auto test = data::select_columns(ctx.test, cols);
  if (s.cfg.shap_rows > 0 && test.rows() > s.cfg.shap_rows) {
    std::vector<std::size_t> head(s.cfg.shap_rows);
    for (std::size_t i = 0; i < head.size(); ++i) head[i] = i;
    test = data::select_rows(test, head);
  }
  shap::ShapSummary summary;
  Matrix values;
  s.profile.add(profiler::profile_stage("shap", s.dataset_tag(), seed, [&] {
    const auto model = gbdt::train(train.values, train.labels, s.cfg.gbdt);
    summary = shap::shap_summary(model, test.values, s.cfg.shap_top, s.cfg.workers,
                                 s.cfg.shap_values ? &values : nullptr);
  }));
  write_text(s.artifact("shap_summary.csv"), shap::summary_to_csv(summary, train.feature_names));
  if (s.cfg.shap_values) {
    std::string csv;
    for (std::size_t j = 0; j < train.feature_names.size(); ++j) {
      csv += (j ? "," : "") + train.feature_names[j];
    }
    csv += "\n";
    for (std::size_t r = 0; r < values.rows(); ++r) {
      for (std::size_t j = 0; j < values.cols(); ++j) csv += (j ? "," : "") + format_double(values(r, j));
      csv += "\n";
    }
    write_text(s.artifact("shap_values.csv"), csv);
  }
}

// Renders a CSV file as a markdown table.
std::string csv_table(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = report::split_csv_line(line);
    out += "|";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
    if (first) {
      out += "|";
      for (std::size_t i = 0; i < cells.size(); ++i) out += " --- |";
      out += "\n";
      first = false;
    }
  }
  return out;
}

void cmd_report(Session& s) {
  struct Section {
    const char* file;
    const char* title;
    const char* producer;
  };
  const Section sections[] = {
      {"kscan.csv", "Feature budget and stability", "kscan"},
      {"redundancy.csv", "Redundancy of the selected features", "redundancy"},
      {"metrics.csv", "Classification metrics (mean and sample std over seeds)", "evaluate"},
      {"stats.csv", "Paired Wilcoxon signed-rank tests", "stats"},
      {"shap_summary.csv", "SHAP summary", "shap"},
  };
  std::string md = "# CAFE-GB report\n\n";
  std::size_t present = 0;
  for (const auto& sec : sections) {
    md += "## " + std::string(sec.title) + "\n\n";
    const auto p = s.artifact(sec.file);
    if (fs::exists(p)) {
      md += csv_table(read_text(p)) + "\n";
      ++present;
    } else {
      md += "_Not produced; run `cafegb " + std::string(sec.producer) + "`._\n\n";
    }
  }
  if (fs::exists(s.artifact("ranking.json"))) {
    ++present;
    const auto doc = nlohmann::json::parse(read_text(s.artifact("ranking.json")));
    md += "## Top of the global ranking\n\n| rank | feature | aggregated gain |\n| --- | --- | --- |\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(20, doc.size()); ++i) {
      md += "| " + std::to_string(doc[i]["rank"].get<std::size_t>()) + " | " +
            doc[i]["feature_name"].get<std::string>() + " | " +
            format_double(doc[i]["aggregated_gain"].get<double>()) + " |\n";
    }
    md += "\n";
  }
  if (present == 0) {
    throw DataError("no artifacts in " + s.out.string() + "; run `cafegb pipeline` or the individual commands first");
  }

  md += "## Notes\n\n";
  int note = 1;
  auto add_note = [&](const std::string& text) { md += std::to_string(note++) + ". " + text + "\n"; };
  if (fs::exists(s.artifact("budget.json"))) {
    const auto doc = nlohmann::json::parse(read_text(s.artifact("budget.json")));
    for (const auto& [name, k] : doc["selected"].items()) {
      add_note("Budget rule (delta = " + format_double(doc["delta"].get<double>()) +
               ") selects k=" + std::to_string(k.get<std::size_t>()) + " for " + name + ".");
    }
  }
  add_note("Rows are shuffled with the run seed before the overlapping chunk windows are laid out; "
           "the final window is clamped to end at the last row.");
  add_note("Chunk importances are raw gain sums" +
           std::string(s.cfg.normalize_chunks ? ", L1-normalized per chunk," : "") +
           " added in chunk order; ties in the ranking go to the lower feature index.");
  add_note("Missing cells take the median of the training rows; zero-variance features keep scale 1.");
  add_note("Jaccard stability is the mean over all unordered seed pairs.");
  add_note("Wilcoxon p-values are two-sided, exact by enumeration when at most 25 untied nonzero "
           "differences remain; CI columns are the Student-t 95% interval of the selected-subset mean.");
  add_note(std::string("SHAP variant: ") + shap::kVariant + ".");
  add_note("Runtime and peak resident memory per stage are in profile.csv.");
  write_text(s.artifact("report.md"), md);
}

void cmd_pipeline(Session& s) {
  cmd_select(s);
  cmd_kscan(s);
  cmd_evaluate(s);
  cmd_redundancy(s);
  cmd_stats(s);
  cmd_shap(s);
  cmd_report(s);
}

void cmd_convert(Session& s) {
  require(!s.cfg.convert_in.empty() && !s.cfg.convert_out.empty(), "convert needs --in and --out");
  const fs::path in(s.cfg.convert_in), out(s.cfg.convert_out);
  const auto ds = is_cache(in) ? data::read_cache(in) : data::load_csv(in, s.cfg.label_column);
  if (is_cache(out)) {
    data::write_cache(ds, out);
  } else {
    data::write_csv(ds, out, s.cfg.label_column);
  }
}

struct Command {
  const char* name;
  const char* help;
  void (*fn)(Session&);
  bool writes_config;
};

const Command kCommands[] = {
    {"synth", "Generate a planted-feature synthetic dataset", cmd_synth, true},
    {"select", "Rank features with CAFE-GB on the first seed's training split", cmd_select, true},
    {"kscan", "Scan feature budgets for accuracy and Jaccard stability", cmd_kscan, true},
    {"evaluate", "Score classifiers on all features and on the selected budget", cmd_evaluate, true},
    {"redundancy", "Pairwise correlation statistics of the selected features", cmd_redundancy, true},
    {"stats", "Paired Wilcoxon tests between baseline and selected-feature runs", cmd_stats, true},
    {"shap", "TreeSHAP summary of a GBDT trained on the selected features", cmd_shap, true},
    {"report", "Collect every table into report.md", cmd_report, true},
    {"pipeline", "Run select, kscan, evaluate, redundancy, stats, shap and report", cmd_pipeline, true},
    {"convert", "Convert between CSV and the binary cache format", cmd_convert, false},
};

// Finds --config in argv before CLI11 runs so flags can override file values.
std::optional<std::string> find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

}  // namespace

const std::vector<Setting>& settings() {
  static const std::vector<Setting> s = build_settings();
  return s;
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto& all = settings();
    const auto it = std::find_if(all.begin(), all.end(), [&](const Setting& st) { return st.key == key; });
    if (it == all.end()) throw UsageError(where + ": unknown key '" + key + "'");
    try {
      it->set(cfg, value);
    } catch (const UsageError& e) {
      throw UsageError(where + ": " + e.what());
    }
  }
}

std::string effective_config(const RunConfig& cfg) {
  std::string out = "# effective configuration\n";
  for (const auto& st : settings()) out += st.key + " = " + st.get(cfg) + "\n";
  return out;
}

int run(int argc, char** argv) {
  RunConfig cfg;
  Command const* chosen = nullptr;
  try {
    if (const auto path = find_config(argc, argv)) {
      apply_config_text(cfg, read_text(*path), *path);
    }
    CLI::App app{"CAFE-GB: chunk-wise aggregated gradient-boosting feature selection"};
    app.require_subcommand(1);
    app.footer(
        "Environment: CAFEGB_OUTPUT_DIR overrides the output directory and CAFEGB_WORKERS the "
        "worker count when the flag is not given.\nExit codes: 0 success, 2 usage error, "
        "3 data error, 4 internal error.");
    std::string config_path;
    for (const auto& cmd : kCommands) {
      auto* sub = app.add_subcommand(cmd.name, cmd.help);
      sub->add_option("--config", config_path, "key = value config file; flags override it");
      sub->add_flag("--quiet", cfg.quiet, "Only print warnings and errors");
      for (const auto& st : settings()) {
        auto* opt = sub->add_option_function<std::string>(
            "--" + st.key, [&cfg, &st](const std::string& v) { st.set(cfg, v); }, st.help);
        if (!st.env.empty()) opt->envname(st.env);
      }
      sub->callback([&chosen, &cmd] { chosen = &cmd; });
    }
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);
      std::cerr << "cafegb: error: " << e.what() << "\n";
      return kExitUsage;
    }
    if (!chosen) return kExitUsage;

    Session s;
    s.cfg = cfg;
    s.log = Logger(cfg.quiet);
    s.out = cfg.output;
    s.validate();
    fs::create_directories(s.out);
    if (chosen->writes_config) write_text(s.artifact("config.effective"), effective_config(cfg));
    chosen->fn(s);
    s.finish_profile();
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "cafegb: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "cafegb: error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "cafegb: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace cafegb::cli
