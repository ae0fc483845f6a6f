#include "cafegb/logreg.hpp"

#include <algorithm>
#include <cmath>

#include "cafegb/error.hpp"
#include "cafegb/gbdt.hpp"

namespace cafegb::eval {

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

void LogRegParams::validate() const {
  require(l2 >= 0.0, "l2 must be nonnegative");
  require(tol >= 0.0, "tol must be nonnegative");
  require(armijo > 0.0 && armijo < 1.0, "armijo constant must lie in (0, 1)");
  require(backtrack > 0.0 && backtrack < 1.0, "backtrack factor must lie in (0, 1)");
  require(initial_step > 0.0, "initial_step must be positive");
}

double LinearModel::margin(std::span<const double> row) const {
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * row[j];
  return z;
}

double logreg_objective(const Matrix& X, std::span<const std::uint8_t> y,
                        std::span<const double> weights, double bias, double l2,
                        std::vector<double>* grad) {
  const std::size_t n = X.rows(), m = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  if (grad) grad->assign(m + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = X.row(i);
    double z = bias;
    for (std::size_t j = 0; j < m; ++j) z += weights[j] * row[j];
    loss += softplus(z) - (y[i] ? z : 0.0);
    if (grad) {
      const double r = gbdt::sigmoid(z) - static_cast<double>(y[i]);
      double* g = grad->data();
      for (std::size_t j = 0; j < m; ++j) g[j] += r * row[j];
      g[m] += r;
    }
  }
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  if (grad) {
    for (std::size_t j = 0; j < m; ++j) (*grad)[j] = (*grad)[j] * inv_n + l2 * weights[j];
    (*grad)[m] *= inv_n;
  }
  return loss * inv_n + 0.5 * l2 * penalty;
}

LinearModel train_logreg(const Matrix& X, std::span<const std::uint8_t> y,
                         const LogRegParams& params) {
  params.validate();
  require(X.rows() > 0 && X.cols() > 0, "training matrix is empty");
  require(y.size() == X.rows(), "label count does not match training rows");
  for (double v : X.data()) {
    if (!std::isfinite(v)) throw DataError("logistic regression input contains non-finite values");
  }
  const auto positives = std::count(y.begin(), y.end(), std::uint8_t{1});
  if (positives == 0 || static_cast<std::size_t>(positives) == y.size()) {
    throw DataError("logistic regression needs both classes");
  }

  const std::size_t m = X.cols();
  LinearModel model;
  model.params = params;
  model.weights.assign(m, 0.0);

  std::vector<double> grad, trial_w(m);
  double f = logreg_objective(X, y, model.weights, model.bias, params.l2, &grad);
  double step = params.initial_step;
  for (std::size_t it = 0; it < params.max_iters; ++it) {
    const double gn = norm2(grad);
    model.grad_norm = gn;
    if (gn <= params.tol) {
      model.converged = true;
      return model;
    }
    // Start each search a little above the last accepted step.
    step = std::min(params.initial_step, step * 2.0);
    double trial_b = 0.0, trial_f = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < m; ++j) trial_w[j] = model.weights[j] - step * grad[j];
      trial_b = model.bias - step * grad[m];
      trial_f = logreg_objective(X, y, trial_w, trial_b, params.l2, nullptr);
      if (trial_f <= f - params.armijo * step * gn * gn) break;
      step *= params.backtrack;
      if (step < 1e-20) {
        model.iterations = it;
        return model;
      }
    }
    model.weights.swap(trial_w);
    model.bias = trial_b;
    model.iterations = it + 1;
    f = logreg_objective(X, y, model.weights, model.bias, params.l2, &grad);
  }
  model.grad_norm = norm2(grad);
  model.converged = model.grad_norm <= params.tol;
  return model;
}

std::vector<double> predict_proba(const LinearModel& model, const Matrix& X) {
  if (X.cols() != model.weights.size()) {
    throw UsageError("model expects " + std::to_string(model.weights.size()) +
                     " features, input has " + std::to_string(X.cols()));
  }
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    out[i] = gbdt::clamp_probability(gbdt::sigmoid(model.margin(X.row(i))));
  }
  return out;
}

}  // namespace cafegb::eval
