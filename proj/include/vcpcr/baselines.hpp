#pragma once

#include <cstdint>
#include <vector>

#include "vcpcr/data.hpp"
#include "vcpcr/partition.hpp"

namespace vcpcr {

// ---------------------------------------------------------------------------
// Column clustering

struct KmeansResult {
  Partition partition;
  Matrix centroids;  // n x K, one centroid per cluster
  double wcss = 0.0;
  std::vector<double> wcss_trace;  // per Lloyd iteration of the winning run
  int iterations = 0;
};

/// Within-cluster sum of squares of the columns of Z under `partition`.
double within_cluster_ss(const Matrix& Z, const Partition& partition);

/// Lloyd iterations on the columns of Z from a starting partition. Empty
/// clusters are re-seeded from the point farthest from its centroid.
KmeansResult kmeans_lloyd(const Matrix& Z, const Partition& start, int max_iter = 100);

/// Best of `n_restarts` k-means++ seeded Lloyd runs on the p columns of Z.
KmeansResult kmeans_columns(const Matrix& Z, int K, std::uint64_t seed, int n_restarts = 10);

struct Merge {
  int left = 0;   // node ids: 0..p-1 leaves, p+m the node made by merge m
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  int leaves = 0;
  std::vector<Merge> merges;  // p - 1 merges in agglomeration order
};

/// Ward minimum-variance agglomeration of the columns of X using the
/// Lance-Williams recurrence on squared Euclidean distances. Heights are the
/// square roots of the merge distances (R's "ward.D2" convention), so two
/// singletons merge at their Euclidean distance.
Dendrogram ward_linkage(const Matrix& X);

/// Partition with K clusters obtained by undoing the last K-1 merges.
Partition cut_tree(const Dendrogram& tree, int K);

Partition ward_hac(const Matrix& X, int K);

// ---------------------------------------------------------------------------
// Cluster Representative Lasso

enum class Clusterer { Kmeans, Ward };

struct CrlFit {
  Partition partition;
  Matrix centroids;  // n x K mean of member columns
  Vector a;          // per-cluster lasso coefficients
  Vector b;          // per-variable coefficients: a_k / p_k for members of k
  double delta = 0.0;

  /// Number of variables in clusters with nonzero coefficient.
  int model_size() const;
  /// Per-variable cluster label, -1 when the cluster is not in the model.
  std::vector<int> selected_labels() const;
};

/// Lasso on the centroids of a fixed partition. Centroids are standardized
/// inside the lasso and the coefficients mapped back to the centroid scale.
CrlFit crl_fit_with_partition(const Matrix& X, const Vector& y, const Partition& partition, double delta);

Partition crl_cluster(const Matrix& X, Clusterer clusterer, int K, std::uint64_t seed);

CrlFit crl_fit(const Matrix& X, const Vector& y, Clusterer clusterer, int K, double delta, std::uint64_t seed);

/// Largest useful delta for a partition (lasso on standardized centroids).
double crl_delta_max(const Matrix& X, const Vector& y, const Partition& partition);

// ---------------------------------------------------------------------------
// Cluster Elastic Net
//
//   J(b, C) = 1/2 ||y - Xb||^2 + delta ||b||_1
//             + lambda/2 sum_k sum_{j in C_k} ||x_j b_j - (1/p_k) sum_{l in C_k} x_l b_l||^2
//
// minimized by alternating exact coordinate descent in b with k-means on the
// coefficient-weighted columns X diag(b).

struct CenOptions {
  int max_outer = 100;
  double outer_tol = 1e-8;
  double inner_tol = 1e-13;
  int max_sweeps = 10000;
  int n_restarts = 10;
};

struct CenFit {
  Vector b;
  Partition partition;
  std::vector<double> objective_trace;  // J after each b-step and each cluster step
  int iterations = 0;
  bool converged = false;
  double delta = 0.0;
  double lambda = 0.0;

  int model_size() const;
  std::vector<int> selected_labels() const;
};

double cen_objective(const Matrix& X, const Vector& y, const Vector& b, const Partition& partition,
                     double delta, double lambda);

/// The grouping penalty sum_k sum_{j in C_k} ||x_j b_j - centroid_k||^2 (no lambda).
double cen_grouping_penalty(const Matrix& X, const Vector& b, const Partition& partition);

/// Coordinate descent in b for a fixed partition.
Vector cen_coefficients(const Matrix& X, const Vector& y, const Partition& partition, double delta,
                        double lambda, const Vector& start, const CenOptions& options = {});

/// K-means on X diag(b) started from `current` plus seeded restarts; never
/// returns a partition with a larger grouping penalty than `current`.
Partition cen_cluster_step(const Matrix& X, const Vector& b, const Partition& current, std::uint64_t seed,
                           int n_restarts = 10);

CenFit cen_fit_with_partition(const Matrix& X, const Vector& y, const Partition& initial, double delta,
                              double lambda, std::uint64_t seed, const CenOptions& options = {});

/// Starts from a seeded random balanced partition.
CenFit cen_fit(const Matrix& X, const Vector& y, int K, double delta, double lambda, std::uint64_t seed,
               const CenOptions& options = {});

/// Largest useful delta for CEN (unnormalized loss): max_j |x_j'y|.
double cen_delta_max(const Matrix& X, const Vector& y);

}  // namespace vcpcr
