#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vcpcr/data.hpp"

namespace vcpcr {

enum class Penalty { None, Lasso, Ridge };

std::string to_string(Penalty penalty);

// Squared-loss fit. Objectives use the 1/(2n) loss scaling:
//   lasso: (1/(2n))||y - Xb||^2 + delta * ||b||_1
//   ridge: (1/(2n))||y - Xb||^2 + delta * ||b||^2   <=>  (X'X + 2n delta I) b = X'y
struct LinearFit {
  Vector coefficients;
  double intercept = 0.0;  // inputs are centered, so always 0 for these solvers
  Penalty penalty = Penalty::None;
  double delta = 0.0;
  double loss = 0.0;  // final objective value
  int iterations = 0;
  bool converged = true;
  bool rank_deficient = false;
  std::vector<double> objective_trace;  // lasso: objective after each sweep
};

struct LogisticFit {
  Vector coefficients;
  double intercept = 0.0;
  bool converged = false;
  bool separated = false;  // likelihood reached zero or the coefficient norm hit the cap
  int iterations = 0;
  double neg_log_likelihood = 0.0;
  std::vector<double> objective_trace;
};

double soft_threshold(double z, double delta);

/// Least squares without intercept. Rank-deficient designs fall back to the
/// minimum-norm solution and set `rank_deficient`.
LinearFit ols_fit(const Matrix& M, const Vector& y);

double lasso_objective(const Matrix& X, const Vector& y, const Vector& b, double delta);

/// Smallest delta for which the lasso solution is exactly zero: max_j |x_j'y| / n.
double lasso_delta_max(const Matrix& X, const Vector& y);

struct LassoOptions {
  double tol = 1e-8;  // relative objective change between sweeps
  int max_sweeps = 10000;
  std::optional<Vector> warm_start;
};

/// Cyclic coordinate descent. Throws MaxIterations if `max_sweeps` is reached.
LinearFit lasso_fit(const Matrix& X, const Vector& y, double delta, const LassoOptions& options = {});

/// Fits along a delta path, each fit warm-started from the previous one.
std::vector<LinearFit> lasso_path(const Matrix& X, const Vector& y, const std::vector<double>& deltas,
                                  const LassoOptions& options = {});

/// Throws SingularSystem when delta == 0 and X'X is singular.
LinearFit ridge_fit(const Matrix& X, const Vector& y, double delta);

struct LogisticOptions {
  int max_iterations = 100;
  double gradient_tol = 1e-9;
  double coefficient_cap = 1e4;
  int max_halvings = 20;
};

/// Unpenalized logistic regression with intercept by IRLS with step-halving.
LogisticFit logistic_fit(const Matrix& M, const Vector& y, const LogisticOptions& options = {});

/// Mean negative log-likelihood plus penalty, intercept unpenalized:
///   (1/n) NLL + delta * ||b||_1      (lasso)
///   (1/n) NLL + delta * ||b||^2      (ridge)
LogisticFit penalized_logistic_fit(const Matrix& X, const Vector& y, Penalty penalty, double delta,
                                   const LogisticOptions& options = {});

double logistic_lasso_delta_max(const Matrix& X, const Vector& y);

double logistic_neg_log_likelihood(const Matrix& M, const Vector& y, double intercept, const Vector& b);

inline double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

}  // namespace vcpcr
