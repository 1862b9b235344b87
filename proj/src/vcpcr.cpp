#include "vcpcr/vcpcr.hpp"

#include <cmath>
#include <limits>

#include "vcpcr/errors.hpp"
#include "vcpcr/solvers.hpp"

namespace vcpcr {

std::string WeightScheme::name() const {
  switch (kind) {
    case WeightKind::Identity: return "identity";
    case WeightKind::Lasso: return "lasso";
    case WeightKind::Ridge: return "ridge";
  }
  return "identity";
}

int VcpcrFit::model_size() const { return static_cast<int>((b.array() != 0.0).count()); }

WeightVector compute_weights(const Matrix& X, const Vector& y, Task task, const WeightScheme& scheme) {
  if (scheme.kind != WeightKind::Identity && !(scheme.delta >= 0.0))
    throw InvalidArgument("weight penalty must be nonnegative");
  switch (scheme.kind) {
    case WeightKind::Identity:
      return WeightVector::ones(X.cols());
    case WeightKind::Lasso:
      if (task == Task::Regression) return {lasso_fit(X, y, scheme.delta).coefficients};
      return {penalized_logistic_fit(X, y, Penalty::Lasso, scheme.delta).coefficients};
    case WeightKind::Ridge:
      if (task == Task::Regression) return {ridge_fit(X, y, scheme.delta).coefficients};
      return {penalized_logistic_fit(X, y, Penalty::Ridge, scheme.delta).coefficients};
  }
  return WeightVector::ones(X.cols());
}

double lambda_max(const Matrix& X, const WeightVector& w, const Partition& partition) {
  if (static_cast<Index>(partition.size()) != X.cols())
    throw DimensionMismatch("partition length differs from column count");
  const MembershipMatrix V = init_membership(partition);

  // One latent per cluster; degenerate clusters are left out exactly as the
  // solver drops them before its first membership update.
  MembershipMatrix kept;
  kept.values.resize(V.values.rows(), 0);
  std::vector<Index> usable;
  int first_degenerate = -1;
  for (Index c = 0; c < V.values.cols(); ++c) {
    MembershipMatrix single{V.values.col(c), {V.cluster_ids[static_cast<std::size_t>(c)]}};
    try {
      (void)update_latent(X, w, single);
      usable.push_back(c);
    } catch (const DegenerateLatent&) {
      if (first_degenerate < 0) first_degenerate = V.cluster_ids[static_cast<std::size_t>(c)];
    }
  }
  if (usable.empty()) throw DegenerateLatent(first_degenerate);
  kept.values.resize(V.values.rows(), static_cast<Index>(usable.size()));
  for (std::size_t c = 0; c < usable.size(); ++c) {
    kept.values.col(static_cast<Index>(c)) = V.values.col(usable[c]);
    kept.cluster_ids.push_back(V.cluster_ids[static_cast<std::size_t>(usable[c])]);
  }
  const LatentMatrix U = update_latent(X, w, kept);
  return weighted_correlations(X, w, U).maxCoeff();
}

VcpcrFit fit_vcpcr_weighted(const Matrix& X, const Vector& y, Task task, const WeightVector& weights,
                            const Partition& partition, double lambda, const SosnmfOptions& options) {
  if (y.size() != X.rows()) throw DimensionMismatch("response length differs from row count");
  VcpcrFit fit;
  fit.task = task;
  fit.weights = weights;
  fit.sosnmf = fit_sosnmf(X, weights, partition, lambda, options);
  const Matrix& V = fit.sosnmf.V.values;

  // The second stage relates the original (unweighted) X to y.
  fit.M = X * V;
  if (task == Task::Regression) {
    const LinearFit ols = ols_fit(fit.M, y);
    fit.a = ols.coefficients;
    fit.rank_deficient = ols.rank_deficient;
  } else {
    const LogisticFit logit = logistic_fit(fit.M, y);
    fit.a = logit.coefficients;
    fit.intercept = logit.intercept;
    fit.separated = logit.separated;
  }
  fit.b = V * fit.a;
  fit.x_center = Vector::Zero(X.cols());
  fit.x_scale = Vector::Ones(X.cols());
  return fit;
}

VcpcrFit fit_vcpcr_standardized(const Matrix& X, const Vector& y, Task task, const WeightScheme& scheme,
                                const Partition& partition, double lambda, const SosnmfOptions& options) {
  VcpcrFit fit = fit_vcpcr_weighted(X, y, task, compute_weights(X, y, task, scheme), partition, lambda,
                                    options);
  fit.scheme = scheme;
  return fit;
}

VcpcrFit fit_vcpcr(const Dataset& data, const WeightScheme& scheme, const Partition& partition,
                   double lambda, const SosnmfOptions& options) {
  data.validate();
  const StandardizedMatrix Xs = standardize(data.X);
  const StandardizedResponse ys = standardize_response(data.y, data.task);
  VcpcrFit fit = fit_vcpcr_standardized(Xs.values, ys.values, data.task, scheme, partition, lambda, options);
  fit.x_center = Xs.center;
  fit.x_scale = Xs.scale;
  fit.y_center = ys.center;
  fit.y_scale = ys.scale;
  return fit;
}

Vector linear_predictor(const VcpcrFit& fit, const Matrix& X_standardized) {
  if (X_standardized.cols() != fit.p()) throw DimensionMismatch("prediction input has wrong column count");
  Vector eta = X_standardized * fit.b;
  eta.array() += fit.intercept;
  return eta;
}

Vector predict(const VcpcrFit& fit, const Matrix& X_new) {
  if (X_new.cols() != fit.p()) throw DimensionMismatch("prediction input has wrong column count");
  const Vector eta = linear_predictor(fit, apply_standardization(X_new, fit.x_center, fit.x_scale));
  if (fit.task == Task::Classification) return eta.unaryExpr([](double e) { return logistic(e); });
  return (eta.array() * fit.y_scale + fit.y_center).matrix();
}

}  // namespace vcpcr
