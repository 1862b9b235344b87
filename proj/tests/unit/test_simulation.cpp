#include <doctest.h>

#include "test_util.hpp"
#include "vcpcr/errors.hpp"
#include "vcpcr/simulation.hpp"

using namespace vcpcr;

TEST_CASE("true coefficients alternate sign over four active blocks") {
  const Vector b = true_coefficients();
  CHECK(b.size() == 200);
  CHECK((b.array() != 0.0).count() == 20);
  CHECK(b.segment(0, 5) == Vector::Ones(5));
  CHECK(b.segment(5, 5).isZero(0.0));
  CHECK(b.segment(10, 5) == -Vector::Ones(5));
  CHECK(b.segment(30, 5) == -Vector::Ones(5));
  CHECK(b.tail(160).isZero(0.0));
  const auto labels = true_labels();
  CHECK(labels[0] == 0);
  CHECK(labels[12] == 1);
  CHECK(labels[5] == 4);
  CHECK(labels[199] == 4);
}

TEST_CASE("signal variance has the block closed form") {
  // Each active block of five equicorrelated unit-variance variables with a
  // common coefficient contributes 5 + 20 rho.
  for (int config = 1; config <= 3; ++config) {
    for (double rho : {0.3, 0.6}) {
      const Matrix Sigma = build_covariance(config, rho);
      const Vector b = true_coefficients();
      CHECK(std::abs(b.dot(Sigma * b) - 4.0 * (5.0 + 20.0 * rho)) < 1e-10);
    }
  }
  const Vector b = true_coefficients();
  CHECK(std::abs(noise_variance(build_covariance(3, 0.6), b, 10.0) - 6.8) < 1e-12);
  CHECK(std::abs(noise_variance(build_covariance(3, 0.3), b, 10.0) - 4.4) < 1e-12);
}

TEST_CASE("covariance layouts differ in the inactive neighbours") {
  const Matrix s1 = build_covariance(1, 0.6);
  const Matrix s2 = build_covariance(2, 0.6);
  const Matrix s3 = build_covariance(3, 0.6);
  CHECK(s1(0, 7) == 0.6);
  CHECK(s2(0, 7) == 0.0);
  CHECK(s2(5, 7) == 0.6);
  CHECK(s3(5, 7) == 0.0);
  CHECK(s3(0, 4) == 0.6);
  CHECK(s3(50, 51) == 0.0);
  CHECK(s1.diagonal() == Vector::Ones(200));
}

TEST_CASE("generated data follow the spec and are reproducible") {
  SimSpec spec;
  spec.n = 25;
  spec.rho = 0.3;
  spec.config = 2;
  const SimulatedData a = generate_dataset(spec);
  const SimulatedData b = generate_dataset(spec);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);
  CHECK(a.data.n() == 25);
  CHECK(a.data.p() == 200);
  CHECK(a.data.column_names.front() == "x1");
  CHECK(a.truth.sigma_eps2 == doctest::Approx(4.4));
  spec.replicate = 1;
  CHECK(generate_dataset(spec).data.X != a.data.X);
}

TEST_CASE("sample covariance approaches the target for large n") {
  SimSpec spec;
  spec.n = 20000;
  spec.allow_noncanonical = true;
  const SimulatedData sim = generate_dataset(spec);
  const Matrix X = sim.data.X.leftCols(12);
  const Matrix centered = X.rowwise() - X.colwise().mean();
  const Matrix S = centered.transpose() * centered / static_cast<double>(spec.n - 1);
  CHECK((S - sim.truth.Sigma.topLeftCorner(12, 12)).cwiseAbs().maxCoeff() < 0.05);
  const Vector residual = sim.data.y - sim.data.X * sim.truth.b;
  CHECK(testing::sample_variance(residual) == doctest::Approx(6.8).epsilon(0.05));
}

TEST_CASE("simulation settings are validated") {
  SimSpec spec;
  spec.n = 30;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.allow_noncanonical = true;
  CHECK_NOTHROW(spec.validate());
  spec.rho = -0.2;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  spec.rho = 0.6;
  spec.config = 4;
  CHECK_THROWS_AS(spec.validate(), InvalidArgument);
  CHECK(canonical_specs().size() == 12);
}
