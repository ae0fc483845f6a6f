#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cafegb/analysis.hpp"
#include "cafegb/chunker.hpp"
#include "cafegb/cli.hpp"
#include "cafegb/data.hpp"
#include "cafegb/error.hpp"
#include "cafegb/gbdt.hpp"
#include "cafegb/metrics.hpp"
#include "cafegb/selector.hpp"
#include "cafegb/shap.hpp"

namespace py = pybind11;
using namespace cafegb;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LabelArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw UsageError("expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw UsageError("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

std::vector<std::uint8_t> to_labels(const LabelArray& a) {
  if (a.ndim() != 1) throw UsageError("expected a 1-d label array");
  return {a.data(), a.data() + a.size()};
}

DoubleArray from_matrix(const Matrix& m) {
  DoubleArray out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

template <class T>
py::array_t<T> from_vector(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

data::DatasetMatrix dataset(const DoubleArray& X, const LabelArray& y) {
  data::DatasetMatrix ds;
  ds.values = to_matrix(X);
  ds.labels = to_labels(y);
  if (ds.labels.size() != ds.values.rows()) throw UsageError("X and y disagree on the row count");
  ds.feature_names = data::default_feature_names(ds.values.cols());
  return ds;
}

py::dict wilcoxon(const DoubleArray& baseline, const DoubleArray& proposed) {
  const auto b = to_vector(baseline), p = to_vector(proposed);
  const auto r = analysis::wilcoxon_signed_rank(b, p);
  py::dict d;
  d["n_effective"] = r.n_effective;
  d["w_plus"] = r.w_plus;
  d["p_value"] = r.p_two_sided;
  d["method"] = analysis::method_tag(r.method);
  if (r.method == analysis::WilcoxonMethod::kExact) {
    d["p_fraction"] = py::make_tuple(r.p_numerator, r.p_denominator);
  }
  d["mean_baseline"] = r.mean_baseline;
  d["mean_proposed"] = r.mean_proposed;
  d["ci95"] = py::make_tuple(r.ci_low, r.ci_high);
  return d;
}

}  // namespace

PYBIND11_MODULE(_cafegb, m) {
  m.doc() = "Chunk-wise gradient-boosting feature selection";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<gbdt::GbdtParams>(m, "GbdtParams")
      .def(py::init<>())
      .def_readwrite("num_rounds", &gbdt::GbdtParams::num_rounds)
      .def_readwrite("learning_rate", &gbdt::GbdtParams::learning_rate)
      .def_readwrite("max_leaves", &gbdt::GbdtParams::max_leaves)
      .def_readwrite("min_samples_leaf", &gbdt::GbdtParams::min_samples_leaf)
      .def_readwrite("l2_reg", &gbdt::GbdtParams::l2_reg)
      .def_readwrite("max_bins", &gbdt::GbdtParams::max_bins)
      .def_readwrite("min_gain_to_split", &gbdt::GbdtParams::min_gain_to_split);

  py::class_<gbdt::GbdtModel>(m, "GbdtModel")
      .def_readonly("base_score", &gbdt::GbdtModel::base_score)
      .def_readonly("num_features", &gbdt::GbdtModel::num_features)
      .def_property_readonly("num_trees", [](const gbdt::GbdtModel& g) { return g.trees.size(); })
      .def("predict_margin",
           [](const gbdt::GbdtModel& g, const DoubleArray& X) {
             return from_vector(gbdt::predict_margin(g, to_matrix(X)));
           })
      .def("predict_proba",
           [](const gbdt::GbdtModel& g, const DoubleArray& X) {
             return from_vector(gbdt::predict_proba(g, to_matrix(X)));
           })
      .def("gain_importance",
           [](const gbdt::GbdtModel& g) { return from_vector(gbdt::gain_importance(g).scores); })
      .def("to_json", [](const gbdt::GbdtModel& g) { return gbdt::model_to_json(g); })
      .def_static("from_json", [](const std::string& text) { return gbdt::model_from_json(text); });

  m.def(
      "train_gbdt",
      [](const DoubleArray& X, const LabelArray& y, const gbdt::GbdtParams& params) {
        const auto Xm = to_matrix(X);
        const auto labels = to_labels(y);
        py::gil_scoped_release release;
        return gbdt::train(Xm, labels, params);
      },
      py::arg("X"), py::arg("y"), py::arg("params") = gbdt::GbdtParams{});

  m.def(
      "select_features",
      [](const DoubleArray& X, const LabelArray& y, std::size_t chunk_size, double overlap,
         std::uint64_t seed, std::size_t workers, bool normalize_chunks,
         const gbdt::GbdtParams& params) {
        const auto ds = dataset(X, y);
        selection::CafeGbConfig cfg;
        cfg.chunk_size = chunk_size;
        cfg.overlap = overlap;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.normalize_chunks = normalize_chunks;
        cfg.gbdt = params;
        selection::FeatureRanking ranking;
        {
          py::gil_scoped_release release;
          ranking = selection::run(ds, cfg);
        }
        return py::make_tuple(from_vector(ranking.order), from_vector(ranking.aggregated.scores));
      },
      py::arg("X"), py::arg("y"), py::arg("chunk_size") = 15000, py::arg("overlap") = 0.1,
      py::arg("seed") = 42, py::arg("workers") = 1, py::arg("normalize_chunks") = false,
      py::arg("gbdt") = gbdt::GbdtParams{},
      "Returns (order, aggregated_gain); order lists feature indices by descending gain.");

  m.def(
      "plan_chunks",
      [](std::size_t n, std::size_t chunk_size, double overlap, std::uint64_t seed) {
        const auto plan = chunker::plan_chunks(n, chunk_size, overlap, seed);
        std::vector<std::pair<std::size_t, std::size_t>> windows;
        for (const auto& w : plan.windows) windows.emplace_back(w.start, w.end);
        return py::make_tuple(windows, from_vector(plan.permutation));
      },
      py::arg("n"), py::arg("chunk_size"), py::arg("overlap") = 0.1, py::arg("seed") = 42,
      "Returns (windows, permutation); windows are [start, end) over permuted rows.");

  m.def(
      "make_synthetic",
      [](std::size_t n, std::size_t features, std::size_t informative, std::uint64_t seed,
         double label_noise, std::size_t duplicate_pairs) {
        data::SyntheticSpec spec;
        spec.n = n;
        spec.m = features;
        spec.d_informative = informative;
        spec.seed = seed;
        spec.label_noise = label_noise;
        spec.duplicate_pairs = duplicate_pairs;
        const auto syn = data::generate_synthetic(spec);
        py::dict d;
        d["X"] = from_matrix(syn.dataset.values);
        d["y"] = from_vector(syn.dataset.labels);
        d["planted"] = syn.planted;
        d["duplicates"] = syn.duplicates;
        return d;
      },
      py::arg("n"), py::arg("features"), py::arg("informative"), py::arg("seed") = 42,
      py::arg("label_noise") = 0.0, py::arg("duplicate_pairs") = 0);

  m.def("accuracy", [](const LabelArray& y, const LabelArray& yhat) {
    return eval::accuracy(to_labels(y), to_labels(yhat));
  });
  m.def("f1", [](const LabelArray& y, const LabelArray& yhat) {
    return eval::f1(to_labels(y), to_labels(yhat));
  });
  m.def("mcc", [](const LabelArray& y, const LabelArray& yhat) {
    return eval::mcc(to_labels(y), to_labels(yhat));
  });
  m.def("roc_auc", [](const LabelArray& y, const DoubleArray& s) {
    return eval::roc_auc(to_labels(y), to_vector(s));
  });
  m.def("pr_auc", [](const LabelArray& y, const DoubleArray& s) {
    return eval::pr_auc(to_labels(y), to_vector(s));
  });

  m.def("wilcoxon", &wilcoxon, py::arg("baseline"), py::arg("proposed"),
        "Paired signed-rank test on proposed - baseline.");
  m.def("jaccard", &analysis::jaccard);
  m.def("stability", &analysis::stability, "Mean pairwise Jaccard similarity.");
  m.def(
      "select_budget",
      [](const std::vector<std::tuple<std::size_t, double, double, double>>& rows, double delta) {
        analysis::StabilityReport report;
        for (const auto& [k, mean, sd, jac] : rows) report.rows.push_back({k, mean, sd, jac});
        return analysis::select_budget(report, delta);
      },
      py::arg("rows"), py::arg("delta") = 0.001,
      "rows are (k, accuracy_mean, accuracy_std, jaccard_stability).");
  m.def(
      "correlation_stats",
      [](const DoubleArray& X, const std::vector<std::size_t>& subset, double threshold) {
        const auto r = analysis::correlation_stats(to_matrix(X), subset, threshold);
        py::dict d;
        d["k"] = r.k;
        d["mean_abs_rho"] = r.mean_abs_rho;
        d["max_abs_rho"] = r.max_abs_rho;
        d["strong_pair_pct"] = r.strong_pair_pct;
        d["pairs"] = r.pairs;
        d["strong_pairs"] = r.strong_pairs;
        d["degenerate_pairs"] = r.degenerate_pairs;
        return d;
      },
      py::arg("X"), py::arg("subset"), py::arg("threshold") = 0.8);

  m.def(
      "tree_shap",
      [](const gbdt::GbdtModel& model, const DoubleArray& X) {
        const auto Xm = to_matrix(X);
        Matrix phi(Xm.rows(), Xm.cols());
        double base = model.base_score;
        for (const auto& t : model.trees) base += shap::expected_value(t);
        for (std::size_t r = 0; r < Xm.rows(); ++r) {
          const auto row = shap::tree_shap(model, Xm.row(r));
          std::copy(row.contributions.begin(), row.contributions.end(), phi.row(r).begin());
        }
        return py::make_tuple(base, from_matrix(phi));
      },
      py::arg("model"), py::arg("X"), "Returns (base_value, contributions) on the margin scale.");

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "cafegb");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        py::gil_scoped_release release;
        return cli::run(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs a cafegb command in-process and returns its exit code.");
}
