#pragma once

#include <string>

#include "vcpcr/data.hpp"
#include "vcpcr/partition.hpp"
#include "vcpcr/sosnmf.hpp"

namespace vcpcr {

enum class WeightKind { Identity, Lasso, Ridge };

struct WeightScheme {
  WeightKind kind = WeightKind::Identity;
  double delta = 0.0;

  static WeightScheme identity() { return {WeightKind::Identity, 0.0}; }
  static WeightScheme lasso(double delta) { return {WeightKind::Lasso, delta}; }
  static WeightScheme ridge(double delta) { return {WeightKind::Ridge, delta}; }

  std::string name() const;
};

// Two-stage model: weighted SOS-NMF clusters and selects variables, then an
// OLS (regression) or logistic (classification) model is fit on the cluster
// latents M = X V. Coefficients on the original variables are b = V a.
struct VcpcrFit {
  WeightScheme scheme;
  Task task = Task::Regression;
  WeightVector weights;
  SosnmfFit sosnmf;
  Matrix M;        // n x K' latents on the training rows
  Vector a;        // per-cluster coefficients
  double intercept = 0.0;  // 0 for regression (centered response)
  Vector b;        // per-variable coefficients
  bool rank_deficient = false;
  bool separated = false;

  // Training standardization; identity when fit on pre-standardized data.
  Vector x_center;
  Vector x_scale;
  double y_center = 0.0;
  double y_scale = 1.0;

  Index p() const { return b.size(); }
  /// Per-variable cluster id, -1 for variables removed by the sparsity penalty.
  std::vector<int> labels() const { return sosnmf.V.labels(); }
  int model_size() const;
};

/// Signed supervision weights. Identity gives all ones; lasso/ridge use the
/// squared-loss solvers for regression and penalized logistic loss for
/// classification. X must be standardized.
WeightVector compute_weights(const Matrix& X, const Vector& y, Task task, const WeightScheme& scheme);

/// Largest useful sparsity level: max_{j,k} w_j cor(u_k, x_j) for the latents
/// of the first iteration. Fitting at or above it leaves V = 0. Clusters whose
/// first latent is constant are skipped, as the solver drops them; throws
/// DegenerateLatent if every cluster is degenerate.
double lambda_max(const Matrix& X, const WeightVector& w, const Partition& partition);

/// Fit on standardized X and (for regression) standardized y with given weights.
VcpcrFit fit_vcpcr_weighted(const Matrix& X, const Vector& y, Task task, const WeightVector& weights,
                            const Partition& partition, double lambda, const SosnmfOptions& options = {});

/// Fit on standardized data, computing the weights from `scheme`.
VcpcrFit fit_vcpcr_standardized(const Matrix& X, const Vector& y, Task task, const WeightScheme& scheme,
                                const Partition& partition, double lambda,
                                const SosnmfOptions& options = {});

/// Standardizes the raw dataset, fits, and records the standardization.
VcpcrFit fit_vcpcr(const Dataset& data, const WeightScheme& scheme, const Partition& partition,
                   double lambda, const SosnmfOptions& options = {});

/// Linear predictor x'b on already-standardized rows (plus intercept).
Vector linear_predictor(const VcpcrFit& fit, const Matrix& X_standardized);

/// Raw rows in, predictions out: de-standardized responses for regression,
/// probabilities for classification.
Vector predict(const VcpcrFit& fit, const Matrix& X_new);

}  // namespace vcpcr
