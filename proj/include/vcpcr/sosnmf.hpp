#pragma once

#include <vector>

#include "vcpcr/data.hpp"
#include "vcpcr/partition.hpp"

namespace vcpcr {

// Weighted Sparse Orthogonal Semi-NMF.
//
// Given standardized predictors X (n x p) and signed per-variable weights w,
// finds unit-variance latent variables U (n x K) and a nonnegative membership
// matrix V (p x K) with at most one nonzero per row minimizing
//
//   1/(2(n-1)) ||X diag(w) - U V'||_F^2 + lambda * sum_jk v_jk.
//
// Variable j joins cluster k only if w_j * cor(u_k, x_j) exceeds lambda and
// k attains the largest weighted correlation; its membership degree is then
// w_j * cor(u_k, x_j) - lambda. Plain SOS-NMF is the all-ones weight case.

/// Diagonal of the supervision matrix W.
struct WeightVector {
  Vector values;

  static WeightVector ones(Index p) { return {Vector::Ones(p)}; }
  Index size() const { return values.size(); }
};

/// p x K' membership degrees. `cluster_ids[c]` is the index, in the initial
/// partition, of the cluster stored in column c; it survives pruning.
struct MembershipMatrix {
  Matrix values;
  std::vector<int> cluster_ids;

  Index p() const { return values.rows(); }
  Index clusters() const { return values.cols(); }

  /// Per-variable cluster id (from `cluster_ids`), or -1 when unassigned.
  std::vector<int> labels() const;
  Index assigned_count() const;
  bool all_zero() const;
};

/// n x K' latent variables, column c belonging to cluster `cluster_ids[c]`.
struct LatentMatrix {
  Matrix values;
  std::vector<int> cluster_ids;
};

struct SosnmfOptions {
  int max_iter = 200;
  double tol = 1e-8;  // relative objective change
};

struct SosnmfFit {
  MembershipMatrix V;
  LatentMatrix U;
  double lambda = 0.0;
  int K_requested = 0;
  std::vector<double> objective_trace;  // objective after each membership update
  int iterations = 0;
  bool converged = false;
  int objective_increases = 0;  // iterations where the objective went up
  std::vector<int> degenerate_clusters;  // clusters dropped for a constant latent

  int K_surviving() const { return static_cast<int>(V.clusters()); }
};

/// v_jk = 1 if variable j is in cluster k of the partition.
MembershipMatrix init_membership(const Partition& partition);

/// Removes all-zero columns.
MembershipMatrix prune_empty_clusters(const MembershipMatrix& V);

/// Least-squares latent per cluster, rescaled to sample variance 1. Because
/// the clusters are disjoint, u_k ~ sum_{j in C_k} v_jk w_j x_j.
/// Throws DegenerateLatent when a cluster's weighted sum is constant.
LatentMatrix update_latent(const Matrix& X, const WeightVector& w, const MembershipMatrix& V);

/// p x K' matrix of w_j * cor(u_k, x_j), using cor = u_k'x_j / (n-1) for
/// standardized X and unit-variance U.
Matrix weighted_correlations(const Matrix& X, const WeightVector& w, const LatentMatrix& U);

/// Row-wise closed-form membership update. Ties go to the lowest column.
MembershipMatrix update_membership(const Matrix& X, const WeightVector& w, const LatentMatrix& U,
                                   double lambda);

double objective(const Matrix& X, const WeightVector& w, const LatentMatrix& U,
                 const MembershipMatrix& V, double lambda);

/// Alternates latent and membership updates from the given partition until
/// the assignment labels repeat, the relative objective change drops below
/// `tol`, or `max_iter` is reached. Clusters with a constant latent are
/// dropped. Throws AllVariablesRemoved if V becomes zero.
SosnmfFit fit_sosnmf(const Matrix& X, const WeightVector& w, const Partition& initial, double lambda,
                     const SosnmfOptions& options = {});

}  // namespace vcpcr
