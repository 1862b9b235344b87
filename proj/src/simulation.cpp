#include "vcpcr/simulation.hpp"

#include <cmath>
#include <string>

#include "vcpcr/errors.hpp"
#include "vcpcr/rng.hpp"

namespace vcpcr {

namespace {

constexpr int kStructuredWidth = 2 * kActiveBlocks * kBlockWidth;  // variables 1..40

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

void fill_block(Matrix& Sigma, int first, int width, double rho) {
  for (int i = first; i < first + width; ++i)
    for (int j = first; j < first + width; ++j)
      if (i != j) Sigma(i, j) = rho;
}

}  // namespace

void SimSpec::validate() const {
  if (config < 1 || config > 3) throw InvalidArgument("config must be 1, 2 or 3");
  if (!(rho > -1.0 / 9.0 && rho < 1.0)) throw InvalidArgument("rho must lie in (-1/9, 1)");
  if (n < 2) throw InvalidArgument("n must be at least 2");
  if (p < kStructuredWidth) throw InvalidArgument("p must be at least 40");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidArgument("snr must be positive");
  if (sigma_eps_override && !(*sigma_eps_override >= 0.0))
    throw InvalidArgument("noise sd override must be nonnegative");
  if (allow_noncanonical) return;
  const bool canonical = (n == 25 || n == 50) && (near(rho, 0.3) || near(rho, 0.6)) && p == 200 &&
                         near(snr, 10.0) && !sigma_eps_override;
  if (!canonical)
    throw InvalidArgument("non-canonical simulation setting (n=" + std::to_string(n) +
                          ", rho=" + std::to_string(rho) + "); enable allow_noncanonical to use it");
}

Vector true_coefficients(int p) {
  if (p < kStructuredWidth) throw InvalidArgument("p must be at least 40");
  Vector b = Vector::Zero(p);
  for (int block = 0; block < kActiveBlocks; ++block) {
    const double sign = block % 2 == 0 ? 1.0 : -1.0;
    b.segment(2 * kBlockWidth * block, kBlockWidth).setConstant(sign);
  }
  return b;
}

std::vector<int> true_labels(int p) {
  if (p < kStructuredWidth) throw InvalidArgument("p must be at least 40");
  std::vector<int> labels(static_cast<std::size_t>(p), kActiveBlocks);
  for (int block = 0; block < kActiveBlocks; ++block)
    for (int j = 0; j < kBlockWidth; ++j) labels[static_cast<std::size_t>(2 * kBlockWidth * block + j)] = block;
  return labels;
}

Matrix build_covariance(int config, double rho, int p) {
  if (config < 1 || config > 3) throw InvalidArgument("config must be 1, 2 or 3");
  if (p < kStructuredWidth) throw InvalidArgument("p must be at least 40");
  Matrix Sigma = Matrix::Identity(p, p);
  for (int block = 0; block < kActiveBlocks; ++block) {
    const int first = 2 * kBlockWidth * block;
    switch (config) {
      case 1:
        fill_block(Sigma, first, 2 * kBlockWidth, rho);
        break;
      case 2:
        fill_block(Sigma, first, kBlockWidth, rho);
        fill_block(Sigma, first + kBlockWidth, kBlockWidth, rho);
        break;
      default:
        fill_block(Sigma, first, kBlockWidth, rho);
        break;
    }
  }
  Eigen::LLT<Matrix> llt(Sigma);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("covariance is not positive definite");
  return Sigma;
}

double noise_variance(const Matrix& Sigma, const Vector& b, double snr) {
  if (!(snr > 0.0)) throw InvalidArgument("snr must be positive");
  if (Sigma.rows() != b.size() || Sigma.cols() != b.size()) throw DimensionMismatch("Sigma and b differ in size");
  return b.dot(Sigma * b) / snr;
}

SimulatedData generate_dataset(const SimSpec& spec) {
  spec.validate();
  SimulatedData out;
  GroundTruth& truth = out.truth;
  truth.b = true_coefficients(spec.p);
  truth.labels = true_labels(spec.p);
  truth.Sigma = build_covariance(spec.config, spec.rho, spec.p);
  truth.sigma_eps2 = spec.sigma_eps_override ? (*spec.sigma_eps_override) * (*spec.sigma_eps_override)
                                             : noise_variance(truth.Sigma, truth.b, spec.snr);

  Eigen::LLT<Matrix> llt(truth.Sigma);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("covariance is not positive definite");
  const Matrix L = llt.matrixL();

  Rng rng = Rng::stream(spec.seed, "data", {spec.replicate});
  Matrix Z(spec.n, spec.p);
  for (Index i = 0; i < Z.rows(); ++i)
    for (Index j = 0; j < Z.cols(); ++j) Z(i, j) = rng.normal();
  Vector eps(spec.n);
  for (Index i = 0; i < eps.size(); ++i) eps(i) = rng.normal();

  Dataset& data = out.data;
  data.X = Z * L.transpose();
  data.y = data.X * truth.b + std::sqrt(truth.sigma_eps2) * eps;
  data.task = Task::Regression;
  data.column_names.reserve(static_cast<std::size_t>(spec.p));
  for (int j = 1; j <= spec.p; ++j) data.column_names.push_back("x" + std::to_string(j));
  data.response_name = "y";
  return out;
}

std::vector<SimSpec> canonical_specs(std::uint64_t seed) {
  std::vector<SimSpec> specs;
  for (int config = 1; config <= 3; ++config)
    for (double rho : {0.3, 0.6})
      for (int n : {25, 50}) {
        SimSpec spec;
        spec.config = config;
        spec.rho = rho;
        spec.n = n;
        spec.seed = seed;
        specs.push_back(spec);
      }
  return specs;
}

}  // namespace vcpcr
