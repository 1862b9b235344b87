#include "vcpcr/sosnmf.hpp"

#include <algorithm>
#include <cmath>

#include "vcpcr/errors.hpp"

namespace vcpcr {

std::vector<int> MembershipMatrix::labels() const {
  std::vector<int> out(static_cast<std::size_t>(values.rows()), -1);
  for (Index j = 0; j < values.rows(); ++j)
    for (Index c = 0; c < values.cols(); ++c)
      if (values(j, c) > 0.0) {
        out[static_cast<std::size_t>(j)] = cluster_ids[static_cast<std::size_t>(c)];
        break;
      }
  return out;
}

Index MembershipMatrix::assigned_count() const {
  Index count = 0;
  for (Index j = 0; j < values.rows(); ++j)
    if ((values.row(j).array() > 0.0).any()) ++count;
  return count;
}

bool MembershipMatrix::all_zero() const { return (values.array() == 0.0).all(); }

MembershipMatrix init_membership(const Partition& partition) {
  partition.validate();
  MembershipMatrix V;
  V.values = Matrix::Zero(static_cast<Index>(partition.size()), partition.K);
  for (std::size_t j = 0; j < partition.size(); ++j)
    V.values(static_cast<Index>(j), partition.labels[j]) = 1.0;
  V.cluster_ids.resize(static_cast<std::size_t>(partition.K));
  for (int k = 0; k < partition.K; ++k) V.cluster_ids[static_cast<std::size_t>(k)] = k;
  return V;
}

MembershipMatrix prune_empty_clusters(const MembershipMatrix& V) {
  std::vector<Index> keep;
  for (Index c = 0; c < V.values.cols(); ++c)
    if ((V.values.col(c).array() != 0.0).any()) keep.push_back(c);
  MembershipMatrix out;
  out.values.resize(V.values.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.values.col(static_cast<Index>(c)) = V.values.col(keep[c]);
    out.cluster_ids.push_back(V.cluster_ids[static_cast<std::size_t>(keep[c])]);
  }
  return out;
}

namespace {

void check_shapes(const Matrix& X, const WeightVector& w) {
  if (w.size() != X.cols()) throw DimensionMismatch("weight vector length differs from column count");
  if (!w.values.allFinite()) throw NonFinite("weights must be finite");
  if (X.rows() < 2) throw InvalidArgument("need at least 2 observations");
}

// Latent columns for every cluster; `degenerate` receives the column
// positions whose weighted sum is constant (those columns are left zero).
Matrix latent_columns(const Matrix& X, const WeightVector& w, const MembershipMatrix& V,
                      std::vector<Index>& degenerate) {
  const Index n = X.rows();
  const double dof = static_cast<double>(n - 1);
  Matrix U = Matrix::Zero(n, V.values.cols());
  for (Index c = 0; c < V.values.cols(); ++c) {
    double v_sq = 0.0;
    double bound = 0.0;
    Vector u = Vector::Zero(n);
    for (Index j = 0; j < V.values.rows(); ++j) {
      const double v = V.values(j, c);
      if (v == 0.0) continue;
      v_sq += v * v;
      bound += std::abs(v * w.values(j));
      if (w.values(j) != 0.0) u.noalias() += (v * w.values(j)) * X.col(j);
    }
    if (v_sq == 0.0) throw InvalidArgument("latent update on an empty cluster; prune first");
    u /= v_sq;
    bound /= v_sq;
    const double mean = u.mean();
    const double sd = std::sqrt((u.array() - mean).square().sum() / dof);
    if (bound == 0.0 || !(sd > 1e-12 * bound)) {
      degenerate.push_back(c);
      continue;
    }
    U.col(c) = u / sd;
  }
  return U;
}

}  // namespace

LatentMatrix update_latent(const Matrix& X, const WeightVector& w, const MembershipMatrix& V) {
  check_shapes(X, w);
  if (V.values.rows() != X.cols()) throw DimensionMismatch("membership rows differ from column count");
  std::vector<Index> degenerate;
  LatentMatrix U{latent_columns(X, w, V, degenerate), V.cluster_ids};
  if (!degenerate.empty())
    throw DegenerateLatent(V.cluster_ids[static_cast<std::size_t>(degenerate.front())]);
  return U;
}

Matrix weighted_correlations(const Matrix& X, const WeightVector& w, const LatentMatrix& U) {
  check_shapes(X, w);
  if (U.values.rows() != X.rows()) throw DimensionMismatch("latent rows differ from observation count");
  const double dof = static_cast<double>(X.rows() - 1);
  Matrix C = X.transpose() * U.values / dof;
  return w.values.asDiagonal() * C;
}

MembershipMatrix update_membership(const Matrix& X, const WeightVector& w, const LatentMatrix& U,
                                   double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
  const Matrix C = weighted_correlations(X, w, U);
  MembershipMatrix V;
  V.cluster_ids = U.cluster_ids;
  V.values = Matrix::Zero(X.cols(), U.values.cols());
  if (U.values.cols() == 0) return V;
  for (Index j = 0; j < C.rows(); ++j) {
    Index best = 0;
    for (Index c = 1; c < C.cols(); ++c)
      if (C(j, c) > C(j, best)) best = c;
    const double degree = C(j, best) - lambda;
    if (degree > 0.0) V.values(j, best) = degree;
  }
  return V;
}

double objective(const Matrix& X, const WeightVector& w, const LatentMatrix& U,
                 const MembershipMatrix& V, double lambda) {
  check_shapes(X, w);
  if (U.values.cols() != V.values.cols() || V.values.rows() != X.cols() || U.values.rows() != X.rows())
    throw DimensionMismatch("objective: shapes do not conform");
  const double dof = static_cast<double>(X.rows() - 1);
  const Matrix residual = X * w.values.asDiagonal() - U.values * V.values.transpose();
  return residual.squaredNorm() / (2.0 * dof) + lambda * V.values.cwiseAbs().sum();
}

SosnmfFit fit_sosnmf(const Matrix& X, const WeightVector& w, const Partition& initial, double lambda,
                     const SosnmfOptions& options) {
  check_shapes(X, w);
  if (static_cast<Index>(initial.size()) != X.cols())
    throw DimensionMismatch("partition length differs from column count");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");

  SosnmfFit fit;
  fit.lambda = lambda;
  fit.K_requested = initial.K;
  MembershipMatrix V = init_membership(initial);
  std::vector<int> previous_labels = initial.labels;
  LatentMatrix U;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    V = prune_empty_clusters(V);
    std::vector<Index> degenerate;
    Matrix latent = latent_columns(X, w, V, degenerate);
    if (!degenerate.empty()) {
      for (Index c : degenerate) {
        fit.degenerate_clusters.push_back(V.cluster_ids[static_cast<std::size_t>(c)]);
        V.values.col(c).setZero();
      }
      V = prune_empty_clusters(V);
      degenerate.clear();
      latent = latent_columns(X, w, V, degenerate);
    }
    if (V.values.cols() == 0) throw AllVariablesRemoved();
    U = LatentMatrix{std::move(latent), V.cluster_ids};

    V = update_membership(X, w, U, lambda);
    if (V.all_zero()) throw AllVariablesRemoved();

    const double value = objective(X, w, U, V, lambda);
    if (!fit.objective_trace.empty() && value > fit.objective_trace.back() * (1.0 + 1e-12) + 1e-15)
      ++fit.objective_increases;
    fit.objective_trace.push_back(value);
    fit.iterations = iter;

    std::vector<int> labels = V.labels();
    if (labels == previous_labels) {
      fit.converged = true;
      break;
    }
    const auto count = fit.objective_trace.size();
    if (count >= 2) {
      const double prev = fit.objective_trace[count - 2];
      const double scale = std::max({std::abs(prev), std::abs(value), 1e-300});
      if (std::abs(prev - value) / scale < options.tol) {
        fit.converged = true;
        break;
      }
    }
    previous_labels = std::move(labels);
  }

  // Pruning keeps V and U aligned: drop clusters that lost every member in
  // the final membership update.
  std::vector<Index> keep;
  for (Index c = 0; c < V.values.cols(); ++c)
    if ((V.values.col(c).array() != 0.0).any()) keep.push_back(c);
  if (static_cast<Index>(keep.size()) != V.values.cols()) {
    MembershipMatrix V_kept;
    LatentMatrix U_kept;
    V_kept.values.resize(V.values.rows(), static_cast<Index>(keep.size()));
    U_kept.values.resize(U.values.rows(), static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
      V_kept.values.col(static_cast<Index>(c)) = V.values.col(keep[c]);
      U_kept.values.col(static_cast<Index>(c)) = U.values.col(keep[c]);
      V_kept.cluster_ids.push_back(V.cluster_ids[static_cast<std::size_t>(keep[c])]);
    }
    U_kept.cluster_ids = V_kept.cluster_ids;
    V = std::move(V_kept);
    U = std::move(U_kept);
  }
  fit.V = std::move(V);
  fit.U = std::move(U);
  return fit;
}

}  // namespace vcpcr
