#include <doctest.h>

#include "test_util.hpp"
#include "vcpcr/errors.hpp"
#include "vcpcr/sosnmf.hpp"

using namespace vcpcr;
using namespace vcpcr::testing;

TEST_CASE("latent update matches the dense least-squares formula") {
  Rng rng = Rng::stream(1, "test");
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix X = random_standardized(rng, 15, 9);
    const WeightVector w = random_weights(rng, 9);
    MembershipMatrix V = init_membership(random_partition(rng, 9, 3));
    for (Index j = 0; j < 9; ++j) V.values.row(j) *= 0.5 + rng.uniform();
    const LatentMatrix U = update_latent(X, w, V);
    const Matrix expected = dense_latents(X, w, V.values);
    CHECK((U.values - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("objective matches explicit summation") {
  Rng rng = Rng::stream(2, "test");
  const Matrix X = random_standardized(rng, 10, 6);
  const WeightVector w = random_weights(rng, 6);
  const MembershipMatrix V = init_membership(random_partition(rng, 6, 2));
  const LatentMatrix U = update_latent(X, w, V);
  double expected = 0.0;
  for (Index j = 0; j < 6; ++j) {
    int column = -1;
    for (Index c = 0; c < 2; ++c)
      if (V.values(j, c) != 0.0) column = static_cast<int>(c);
    expected += row_objective(X, w, U.values, j, column, column < 0 ? 0.0 : V.values(j, column), 0.2);
  }
  CHECK(objective(X, w, U, V, 0.2) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("membership update agrees with per-variable brute force") {
  Rng rng = Rng::stream(3, "test");
  for (int rep = 0; rep < 50; ++rep) {
    const Index n = 4 + static_cast<Index>(rng.below(9));
    const Index p = 3 + static_cast<Index>(rng.below(8));
    const int K = 1 + static_cast<int>(rng.below(3));
    const Matrix X = random_standardized(rng, n, p);
    const WeightVector w = random_weights(rng, p);
    const LatentMatrix U = update_latent(X, w, init_membership(random_partition(rng, static_cast<int>(p), K)));
    const double lambda = 0.3 * rng.uniform();
    const MembershipMatrix V = update_membership(X, w, U, lambda);
    for (Index j = 0; j < p; ++j) {
      const RowOracle oracle = brute_force_row(X, w, U.values, j, lambda);
      int column = -1;
      for (Index c = 0; c < V.clusters(); ++c)
        if (V.values(j, c) > 0.0) column = static_cast<int>(c);
      CHECK(column == oracle.column);
      const double value = row_objective(X, w, U.values, j, column, column < 0 ? 0.0 : V.values(j, column), lambda);
      CHECK(std::abs(value - oracle.value) <= 1e-10);
    }
  }
}

TEST_CASE("membership degree is the weighted correlation minus lambda") {
  Rng rng = Rng::stream(4, "test");
  const Matrix X = random_standardized(rng, 20, 6);
  const WeightVector w = WeightVector::ones(6);
  const LatentMatrix U = update_latent(X, w, init_membership(Partition{{0, 0, 0, 1, 1, 1}, 2}));
  const MembershipMatrix V = update_membership(X, w, U, 0.1);
  for (Index j = 0; j < 6; ++j)
    for (Index c = 0; c < 2; ++c)
      if (V.values(j, c) > 0.0) CHECK(V.values(j, c) == doctest::Approx(sample_correlation(U.values.col(c), X.col(j)) - 0.1));
}

TEST_CASE("fits preserve structure and never end above their start") {
  Rng rng = Rng::stream(5, "test");
  for (int rep = 0; rep < 30; ++rep) {
    const Matrix X = random_standardized(rng, 20, 12);
    const WeightVector w = rep % 2 ? random_weights(rng, 12) : WeightVector::ones(12);
    const Partition part = random_partition(rng, 12, 3);
    const double lambda = 0.05 * static_cast<double>(rep % 4);
    SosnmfFit fit;
    try {
      fit = fit_sosnmf(X, w, part, lambda);
    } catch (const AllVariablesRemoved&) {
      continue;
    }
    const Matrix& V = fit.V.values;
    for (Index j = 0; j < V.rows(); ++j) CHECK((V.row(j).array() != 0.0).count() <= 1);
    CHECK((V.array() >= 0.0).all());
    const Matrix gram = V.transpose() * V;
    CHECK((gram - Matrix(gram.diagonal().asDiagonal())).isZero(0.0));
    for (Index c = 0; c < fit.U.values.cols(); ++c) CHECK(std::abs(sample_variance(fit.U.values.col(c)) - 1.0) < 1e-8);
    CHECK(fit.objective_trace.back() <= initial_objective(X, w, part, lambda) + 1e-12);
    CHECK(fit.objective_increases == 0);
    CHECK(fit.V.cluster_ids == fit.U.cluster_ids);
  }
}

TEST_CASE("large lambda removes every variable") {
  Rng rng = Rng::stream(6, "test");
  const Matrix X = random_standardized(rng, 10, 5);
  CHECK_THROWS_AS(fit_sosnmf(X, WeightVector::ones(5), Partition{{0, 1, 0, 1, 0}, 2}, 5.0), AllVariablesRemoved);
}

TEST_CASE("zero-weight clusters are dropped as degenerate") {
  Rng rng = Rng::stream(7, "test");
  const Matrix X = random_standardized(rng, 12, 6);
  Vector w = Vector::Ones(6);
  w(4) = 0.0;
  w(5) = 0.0;
  const SosnmfFit fit = fit_sosnmf(X, {w}, Partition{{0, 0, 1, 1, 2, 2}, 3}, 0.0);
  CHECK(fit.degenerate_clusters == std::vector<int>{2});
  CHECK(fit.K_surviving() <= 2);
  CHECK_THROWS_AS(update_latent(X, {w}, init_membership(Partition{{0, 0, 1, 1, 2, 2}, 3})), DegenerateLatent);
}

TEST_CASE("two planted blocks are recovered without sparsity") {
  Rng rng = Rng::stream(8, "test");
  const Index n = 60;
  const Vector f1 = random_vector(rng, n);
  const Vector f2 = random_vector(rng, n);
  Matrix X(n, 8);
  for (Index j = 0; j < 8; ++j) X.col(j) = (j < 4 ? f1 : f2) + 0.3 * random_vector(rng, n);
  const Matrix Xs = standardize(X).values;
  const SosnmfFit fit = fit_sosnmf(Xs, WeightVector::ones(8), Partition{{0, 0, 1, 1, 1, 1, 1, 1}, 2}, 0.0);
  const auto labels = fit.V.labels();
  for (int j = 1; j < 4; ++j) CHECK(labels[j] == labels[0]);
  for (int j = 5; j < 8; ++j) CHECK(labels[j] == labels[4]);
  CHECK(labels[0] != labels[4]);
}

TEST_CASE("negative weights keep anti-correlated variables in one cluster") {
  Rng rng = Rng::stream(9, "test");
  const Index n = 50;
  const Vector f = random_vector(rng, n);
  Matrix X(n, 4);
  for (Index j = 0; j < 4; ++j) X.col(j) = (j % 2 ? -f : f) + 0.2 * random_vector(rng, n);
  const Matrix Xs = standardize(X).values;
  Vector w(4);
  w << 1, -1, 1, -1;
  const Partition one{{0, 0, 0, 0}, 1};
  CHECK(fit_sosnmf(Xs, {w}, one, 0.5).V.assigned_count() == 4);
  CHECK(fit_sosnmf(Xs, WeightVector::ones(4), Partition{{0, 0, 0, 1}, 2}, 0.5).V.clusters() == 2);
}
