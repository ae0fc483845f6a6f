#include "cafegb/experiment.hpp"

#include "cafegb/error.hpp"

namespace cafegb::eval {

Classifier parse_classifier(std::string_view tag) {
  if (tag == "gbdt" || tag == "lgbm-analog") return Classifier::kGbdt;
  if (tag == "logreg") return Classifier::kLogReg;
  throw UsageError("unknown classifier '" + std::string(tag) + "' (expected gbdt or logreg)");
}

std::string classifier_tag(Classifier c) { return c == Classifier::kGbdt ? "gbdt" : "logreg"; }

std::string FeatureSet::tag() const {
  return baseline() ? std::string("baseline") : "cafegb-" + std::to_string(k);
}

SeedContext prepare_seed(const data::DatasetMatrix& ds, std::uint64_t seed, double test_fraction) {
  SeedContext ctx;
  ctx.seed = seed;
  ctx.split = data::stratified_split(ds, test_fraction, seed);
  if (ds.missing.empty()) {
    const auto scaler = data::fit_scaler(ds, ctx.split.train_indices);
    ctx.train = data::transform(scaler, data::select_rows(ds, ctx.split.train_indices));
    ctx.test = data::transform(scaler, data::select_rows(ds, ctx.split.test_indices));
  } else {
    auto imputed = ds;
    data::impute_from_rows(imputed, ctx.split.train_indices);
    const auto scaler = data::fit_scaler(imputed, ctx.split.train_indices);
    ctx.train = data::transform(scaler, data::select_rows(imputed, ctx.split.train_indices));
    ctx.test = data::transform(scaler, data::select_rows(imputed, ctx.split.test_indices));
  }
  return ctx;
}

selection::FeatureRanking select_features(const SeedContext& ctx, const ExperimentConfig& cfg) {
  auto sel = cfg.cafegb;
  sel.seed = ctx.seed;
  return selection::run(ctx.train, sel);
}

MetricsReport fit_and_score(const SeedContext& ctx, const std::vector<std::size_t>& columns,
                            Classifier classifier, const ExperimentConfig& cfg) {
  const bool all = columns.empty();
  data::DatasetMatrix train_sub, test_sub;
  if (!all) {
    train_sub = data::select_columns(ctx.train, columns);
    test_sub = data::select_columns(ctx.test, columns);
  }
  const auto& train = all ? ctx.train : train_sub;
  const auto& test = all ? ctx.test : test_sub;

  std::vector<double> proba;
  if (classifier == Classifier::kGbdt) {
    const auto model = gbdt::train(train.values, train.labels, cfg.gbdt);
    proba = gbdt::predict_proba(model, test.values);
  } else {
    const auto model = train_logreg(train.values, train.labels, cfg.logreg);
    proba = predict_proba(model, test.values);
  }
  auto report = score(test.labels, proba);
  report.seed = ctx.seed;
  report.classifier = classifier_tag(classifier);
  return report;
}

ExperimentResult run_experiment(const data::DatasetMatrix& ds, const FeatureSet& features,
                                Classifier classifier, const std::vector<std::uint64_t>& seeds,
                                const ExperimentConfig& cfg) {
  require(!seeds.empty(), "run_experiment needs at least one seed");
  require(features.k <= ds.features(), "feature budget " + std::to_string(features.k) +
                                           " exceeds " + std::to_string(ds.features()) +
                                           " features");
  ExperimentResult result;
  for (const auto seed : seeds) {
    const auto ctx = prepare_seed(ds, seed, cfg.test_fraction);
    std::vector<std::size_t> columns;
    if (!features.baseline()) {
      auto ranking = select_features(ctx, cfg);
      columns = selection::top_k(ranking, features.k);
      result.rankings.push_back(std::move(ranking));
      result.selected.push_back(columns);
    }
    auto report = fit_and_score(ctx, columns, classifier, cfg);
    report.feature_set = features.tag();
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace cafegb::eval
