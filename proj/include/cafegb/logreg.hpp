#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cafegb/matrix.hpp"

namespace cafegb::eval {

struct LogRegParams {
  double l2 = 1e-4;
  std::size_t max_iters = 500;
  double tol = 1e-6;
  /// Armijo sufficient-decrease constant and backtracking factor.
  double armijo = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;

  void validate() const;
};

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogRegParams params;
  bool converged = false;
  std::size_t iterations = 0;
  double grad_norm = 0.0;

  double margin(std::span<const double> row) const;
};

/// Objective: mean log-loss + (l2 / 2) * ||w||^2; the bias is not penalized.
/// Fills `grad` (size m + 1, bias last) when non-null and returns the objective.
double logreg_objective(const Matrix& X, std::span<const std::uint8_t> y,
                        std::span<const double> weights, double bias, double l2,
                        std::vector<double>* grad);

/// Full-batch gradient descent with backtracking line search from w = 0, b = 0.
LinearModel train_logreg(const Matrix& X, std::span<const std::uint8_t> y,
                         const LogRegParams& params);

std::vector<double> predict_proba(const LinearModel& model, const Matrix& X);

}  // namespace cafegb::eval
