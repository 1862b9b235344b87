#include "vcpcr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vcpcr/errors.hpp"
#include "vcpcr/rng.hpp"
#include "vcpcr/solvers.hpp"

namespace vcpcr {

// ---------------------------------------------------------------------------
// k-means

namespace {

Matrix centroids_of(const Matrix& Z, const std::vector<int>& labels, int K, std::vector<int>& counts) {
  Matrix C = Matrix::Zero(Z.rows(), K);
  counts.assign(static_cast<std::size_t>(K), 0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    C.col(labels[j]) += Z.col(static_cast<Index>(j));
    ++counts[static_cast<std::size_t>(labels[j])];
  }
  for (int k = 0; k < K; ++k)
    if (counts[static_cast<std::size_t>(k)] > 0) C.col(k) /= counts[static_cast<std::size_t>(k)];
  return C;
}

double wcss_of(const Matrix& Z, const std::vector<int>& labels, const Matrix& C) {
  double total = 0.0;
  for (std::size_t j = 0; j < labels.size(); ++j)
    total += (Z.col(static_cast<Index>(j)) - C.col(labels[j])).squaredNorm();
  return total;
}

// Moves the point farthest from its centroid (in a cluster of size > 1) into
// each empty cluster.
void reseed_empty(const Matrix& Z, std::vector<int>& labels, int K, Matrix& C, std::vector<int>& counts) {
  for (int k = 0; k < K; ++k) {
    if (counts[static_cast<std::size_t>(k)] > 0) continue;
    double farthest = -1.0;
    std::size_t chosen = labels.size();
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (counts[static_cast<std::size_t>(labels[j])] < 2) continue;
      const double d = (Z.col(static_cast<Index>(j)) - C.col(labels[j])).squaredNorm();
      if (d > farthest) {
        farthest = d;
        chosen = j;
      }
    }
    if (chosen == labels.size()) return;  // fewer points than clusters
    labels[chosen] = k;
    C = centroids_of(Z, labels, K, counts);
  }
}

}  // namespace

double within_cluster_ss(const Matrix& Z, const Partition& partition) {
  if (static_cast<Index>(partition.size()) != Z.cols()) throw DimensionMismatch("partition length differs");
  std::vector<int> counts;
  const Matrix C = centroids_of(Z, partition.labels, partition.K, counts);
  return wcss_of(Z, partition.labels, C);
}

KmeansResult kmeans_lloyd(const Matrix& Z, const Partition& start, int max_iter) {
  if (static_cast<Index>(start.size()) != Z.cols()) throw DimensionMismatch("partition length differs");
  const int K = start.K;
  if (K < 1 || K > Z.cols()) throw InvalidArgument("k-means needs 1 <= K <= number of points");
  std::vector<int> labels = start.labels;
  std::vector<int> counts;
  Matrix C = centroids_of(Z, labels, K, counts);
  reseed_empty(Z, labels, K, C, counts);

  KmeansResult result;
  result.wcss_trace.push_back(wcss_of(Z, labels, C));
  for (int it = 1; it <= max_iter; ++it) {
    bool changed = false;
    for (Index j = 0; j < Z.cols(); ++j) {
      int best = labels[static_cast<std::size_t>(j)];
      double best_d = (Z.col(j) - C.col(best)).squaredNorm();
      for (int k = 0; k < K; ++k) {
        const double d = (Z.col(j) - C.col(k)).squaredNorm();
        if (d < best_d || (d == best_d && k < best)) {
          best_d = d;
          best = k;
        }
      }
      if (best != labels[static_cast<std::size_t>(j)]) {
        labels[static_cast<std::size_t>(j)] = best;
        changed = true;
      }
    }
    C = centroids_of(Z, labels, K, counts);
    reseed_empty(Z, labels, K, C, counts);
    result.wcss_trace.push_back(wcss_of(Z, labels, C));
    result.iterations = it;
    if (!changed) break;
  }
  result.partition.labels = std::move(labels);
  result.partition.K = K;
  result.centroids = std::move(C);
  result.wcss = result.wcss_trace.back();
  return result;
}

KmeansResult kmeans_columns(const Matrix& Z, int K, std::uint64_t seed, int n_restarts) {
  const Index p = Z.cols();
  if (K < 1 || K > p) throw InvalidArgument("k-means needs 1 <= K <= number of points");
  if (n_restarts < 1) throw InvalidArgument("k-means needs at least one restart");
  KmeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < n_restarts; ++r) {
    Rng rng = Rng::stream(seed, "kmeans", {static_cast<std::uint64_t>(r)});
    // k-means++ seeding
    std::vector<Index> centers;
    centers.push_back(static_cast<Index>(rng.below(static_cast<std::uint64_t>(p))));
    Vector nearest = Vector::Constant(p, std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < K) {
      const Index last = centers.back();
      for (Index j = 0; j < p; ++j) nearest(j) = std::min(nearest(j), (Z.col(j) - Z.col(last)).squaredNorm());
      const double total = nearest.sum();
      Index pick = 0;
      if (total > 0.0) {
        double target = rng.uniform() * total;
        pick = p - 1;
        for (Index j = 0; j < p; ++j) {
          target -= nearest(j);
          if (target < 0.0) {
            pick = j;
            break;
          }
        }
      } else {
        pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(p)));
      }
      centers.push_back(pick);
    }
    Partition start;
    start.K = K;
    start.labels.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) {
      int best_k = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) {
        const double d = (Z.col(j) - Z.col(centers[static_cast<std::size_t>(k)])).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best_k = k;
        }
      }
      start.labels[static_cast<std::size_t>(j)] = best_k;
    }
    for (int k = 0; k < K; ++k) start.labels[static_cast<std::size_t>(centers[static_cast<std::size_t>(k)])] = k;
    KmeansResult run = kmeans_lloyd(Z, start);
    if (run.wcss < best.wcss) best = std::move(run);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Ward

Dendrogram ward_linkage(const Matrix& X) {
  const Index p = X.cols();
  if (p < 1) throw InvalidArgument("ward linkage needs at least one column");
  Matrix D(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) D(i, j) = (X.col(i) - X.col(j)).squaredNorm();

  std::vector<bool> active(static_cast<std::size_t>(p), true);
  std::vector<int> node(static_cast<std::size_t>(p));
  std::vector<int> size(static_cast<std::size_t>(p), 1);
  std::iota(node.begin(), node.end(), 0);

  Dendrogram tree;
  tree.leaves = static_cast<int>(p);
  for (Index m = 0; m + 1 < p; ++m) {
    Index bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < p; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (Index j = i + 1; j < p; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        if (D(i, j) < best) {
          best = D(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = size[static_cast<std::size_t>(bi)];
    const double nj = size[static_cast<std::size_t>(bj)];
    for (Index k = 0; k < p; ++k) {
      if (!active[static_cast<std::size_t>(k)] || k == bi || k == bj) continue;
      const double nk = size[static_cast<std::size_t>(k)];
      const double updated = ((ni + nk) * D(k, bi) + (nj + nk) * D(k, bj) - nk * D(bi, bj)) / (ni + nj + nk);
      D(k, bi) = D(bi, k) = updated;
    }
    Merge merge;
    merge.left = std::min(node[static_cast<std::size_t>(bi)], node[static_cast<std::size_t>(bj)]);
    merge.right = std::max(node[static_cast<std::size_t>(bi)], node[static_cast<std::size_t>(bj)]);
    merge.height = std::sqrt(std::max(best, 0.0));
    merge.size = static_cast<int>(ni + nj);
    tree.merges.push_back(merge);
    active[static_cast<std::size_t>(bj)] = false;
    size[static_cast<std::size_t>(bi)] = merge.size;
    node[static_cast<std::size_t>(bi)] = static_cast<int>(p + m);
  }
  return tree;
}

Partition cut_tree(const Dendrogram& tree, int K) {
  const int p = tree.leaves;
  if (K < 1 || K > p) throw InvalidArgument("cut_tree needs 1 <= K <= leaves");
  std::vector<int> parent(static_cast<std::size_t>(2 * p), -1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (int m = 0; m < p - K; ++m) {
    const Merge& merge = tree.merges[static_cast<std::size_t>(m)];
    const int id = p + m;
    parent[static_cast<std::size_t>(find(merge.left))] = id;
    parent[static_cast<std::size_t>(find(merge.right))] = id;
  }
  std::vector<int> roots(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) roots[static_cast<std::size_t>(j)] = find(j);
  return canonicalize(roots);
}

Partition ward_hac(const Matrix& X, int K) { return cut_tree(ward_linkage(X), K); }

// ---------------------------------------------------------------------------
// CRL

int CrlFit::model_size() const {
  const auto sizes = partition.cluster_sizes();
  int s = 0;
  for (int k = 0; k < partition.K; ++k)
    if (a(k) != 0.0) s += sizes[static_cast<std::size_t>(k)];
  return s;
}

std::vector<int> CrlFit::selected_labels() const {
  std::vector<int> out(partition.labels.size(), -1);
  for (std::size_t j = 0; j < out.size(); ++j)
    if (a(partition.labels[j]) != 0.0) out[j] = partition.labels[j];
  return out;
}

namespace {

struct ScaledCentroids {
  Matrix values;       // standardized centroids; constant ones left at zero
  Vector scale;        // 0 for constant centroids
  Matrix raw;
};

ScaledCentroids scaled_centroids(const Matrix& X, const Partition& partition) {
  partition.validate();
  if (static_cast<Index>(partition.size()) != X.cols()) throw DimensionMismatch("partition length differs");
  std::vector<int> counts;
  ScaledCentroids out;
  out.raw = centroids_of(X, partition.labels, partition.K, counts);
  out.values = Matrix::Zero(X.rows(), partition.K);
  out.scale = Vector::Zero(partition.K);
  for (int k = 0; k < partition.K; ++k) {
    const Vector col = out.raw.col(k);
    const double sd = sample_sd(col);
    if (!(sd > 1e-12)) continue;
    out.scale(k) = sd;
    out.values.col(k) = (col.array() - col.mean()) / sd;
  }
  return out;
}

}  // namespace

double crl_delta_max(const Matrix& X, const Vector& y, const Partition& partition) {
  return lasso_delta_max(scaled_centroids(X, partition).values, y);
}

CrlFit crl_fit_with_partition(const Matrix& X, const Vector& y, const Partition& partition, double delta) {
  if (y.size() != X.rows()) throw DimensionMismatch("response length differs from row count");
  const ScaledCentroids centroids = scaled_centroids(X, partition);
  const LinearFit lasso = lasso_fit(centroids.values, y, delta);
  CrlFit fit;
  fit.partition = partition;
  fit.centroids = centroids.raw;
  fit.delta = delta;
  fit.a = Vector::Zero(partition.K);
  for (int k = 0; k < partition.K; ++k)
    if (centroids.scale(k) > 0.0) fit.a(k) = lasso.coefficients(k) / centroids.scale(k);
  const auto sizes = partition.cluster_sizes();
  fit.b = Vector::Zero(X.cols());
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const int k = partition.labels[j];
    fit.b(static_cast<Index>(j)) = fit.a(k) / sizes[static_cast<std::size_t>(k)];
  }
  return fit;
}

Partition crl_cluster(const Matrix& X, Clusterer clusterer, int K, std::uint64_t seed) {
  if (clusterer == Clusterer::Ward) return ward_hac(X, K);
  return kmeans_columns(X, K, seed).partition;
}

CrlFit crl_fit(const Matrix& X, const Vector& y, Clusterer clusterer, int K, double delta, std::uint64_t seed) {
  return crl_fit_with_partition(X, y, crl_cluster(X, clusterer, K, seed), delta);
}

// ---------------------------------------------------------------------------
// CEN

int CenFit::model_size() const { return static_cast<int>((b.array() != 0.0).count()); }

std::vector<int> CenFit::selected_labels() const {
  std::vector<int> out(partition.labels.size(), -1);
  for (std::size_t j = 0; j < out.size(); ++j)
    if (b(static_cast<Index>(j)) != 0.0) out[j] = partition.labels[j];
  return out;
}

double cen_grouping_penalty(const Matrix& X, const Vector& b, const Partition& partition) {
  return within_cluster_ss(X * b.asDiagonal(), partition);
}

double cen_objective(const Matrix& X, const Vector& y, const Vector& b, const Partition& partition,
                     double delta, double lambda) {
  return 0.5 * (y - X * b).squaredNorm() + delta * b.lpNorm<1>() +
         0.5 * lambda * cen_grouping_penalty(X, b, partition);
}

double cen_delta_max(const Matrix& X, const Vector& y) {
  double best = 0.0;
  for (Index j = 0; j < X.cols(); ++j) best = std::max(best, std::abs(X.col(j).dot(y)));
  return best;
}

Vector cen_coefficients(const Matrix& X, const Vector& y, const Partition& partition, double delta,
                        double lambda, const Vector& start, const CenOptions& options) {
  const Index p = X.cols();
  if (start.size() != p) throw DimensionMismatch("start vector has wrong length");
  const int K = partition.K;
  const auto sizes = partition.cluster_sizes();
  const Vector col_sq = X.colwise().squaredNorm().transpose();

  Vector b = start;
  Vector residual = y - X * b;
  Matrix sums = Matrix::Zero(X.rows(), K);
  for (Index j = 0; j < p; ++j)
    if (b(j) != 0.0) sums.col(partition.labels[static_cast<std::size_t>(j)]) += b(j) * X.col(j);

  auto current_objective = [&]() {
    double group = 0.0;
    for (Index j = 0; j < p; ++j) group += b(j) * b(j) * col_sq(j);
    for (int k = 0; k < K; ++k) group -= sums.col(k).squaredNorm() / sizes[static_cast<std::size_t>(k)];
    return 0.5 * residual.squaredNorm() + delta * b.lpNorm<1>() + 0.5 * lambda * group;
  };

  double value = current_objective();
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    for (Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) continue;
      const int k = partition.labels[static_cast<std::size_t>(j)];
      const double pk = sizes[static_cast<std::size_t>(k)];
      const double old = b(j);
      const double fit_term = X.col(j).dot(residual) + col_sq(j) * old;
      const double cross = X.col(j).dot(sums.col(k)) - col_sq(j) * old;
      const double denom = col_sq(j) * (1.0 + lambda * (pk - 1.0) / pk);
      const double updated = soft_threshold(fit_term + lambda / pk * cross, delta) / denom;
      if (updated != old) {
        residual.noalias() -= (updated - old) * X.col(j);
        sums.col(k).noalias() += (updated - old) * X.col(j);
        b(j) = updated;
      }
    }
    const double next = current_objective();
    const double scale = std::max({std::abs(value), std::abs(next), 1e-300});
    const double change = std::abs(value - next) / scale;
    value = next;
    if (change < options.inner_tol) return b;
  }
  throw MaxIterations(options.max_sweeps);
}

Partition cen_cluster_step(const Matrix& X, const Vector& b, const Partition& current, std::uint64_t seed,
                           int n_restarts) {
  const Matrix Z = X * b.asDiagonal();
  KmeansResult best = kmeans_lloyd(Z, current);
  if (n_restarts > 0 && current.K <= Z.cols()) {
    KmeansResult fresh = kmeans_columns(Z, current.K, seed, n_restarts);
    if (fresh.wcss < best.wcss) best = std::move(fresh);
  }
  return best.partition;
}

CenFit cen_fit_with_partition(const Matrix& X, const Vector& y, const Partition& initial, double delta,
                              double lambda, std::uint64_t seed, const CenOptions& options) {
  if (y.size() != X.rows()) throw DimensionMismatch("response length differs from row count");
  if (!(delta >= 0.0) || !(lambda >= 0.0)) throw InvalidArgument("CEN penalties must be nonnegative");
  initial.validate();
  CenFit fit;
  fit.delta = delta;
  fit.lambda = lambda;
  fit.partition = initial;
  fit.b = Vector::Zero(X.cols());
  double previous = cen_objective(X, y, fit.b, fit.partition, delta, lambda);
  fit.objective_trace.push_back(previous);
  for (int outer = 1; outer <= options.max_outer; ++outer) {
    fit.b = cen_coefficients(X, y, fit.partition, delta, lambda, fit.b, options);
    fit.objective_trace.push_back(cen_objective(X, y, fit.b, fit.partition, delta, lambda));
    fit.iterations = outer;
    if ((fit.b.array() == 0.0).all()) {
      fit.converged = true;
      break;
    }
    if (lambda > 0.0) {
      fit.partition = cen_cluster_step(X, fit.b, fit.partition, seed + static_cast<std::uint64_t>(outer),
                                       options.n_restarts);
      fit.objective_trace.push_back(cen_objective(X, y, fit.b, fit.partition, delta, lambda));
    }
    const double value = fit.objective_trace.back();
    const double scale = std::max({std::abs(previous), std::abs(value), 1e-300});
    const double change = std::abs(previous - value) / scale;
    previous = value;
    if (change < options.outer_tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

CenFit cen_fit(const Matrix& X, const Vector& y, int K, double delta, double lambda, std::uint64_t seed,
               const CenOptions& options) {
  return cen_fit_with_partition(X, y, random_balanced_partition(static_cast<int>(X.cols()), K, seed), delta,
                                lambda, seed, options);
}

}  // namespace vcpcr
