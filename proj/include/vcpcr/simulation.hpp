#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vcpcr/data.hpp"

namespace vcpcr {

// Block-covariance Gaussian design with four active blocks of five variables.
//
// Active blocks G1..G4 are variables 1-5, 11-15, 21-25, 31-35 (1-based) with
// true coefficients +1, -1, +1, -1. The inactive blocks 6-10, 16-20, 26-30,
// 36-40 are laid out per configuration:
//   config 1: each inactive block joins its preceding active block in one
//             10-variable equicorrelated block
//   config 2: each inactive block is equicorrelated on its own
//   config 3: inactive variables are independent
// Variables 41..p are always independent.
struct SimSpec {
  int config = 3;
  int n = 50;
  int p = 200;
  double rho = 0.6;
  double snr = 10.0;
  std::uint64_t seed = 1;
  std::uint64_t replicate = 0;
  bool allow_noncanonical = false;
  std::optional<double> sigma_eps_override;  // replaces the SNR-calibrated noise sd

  // Throws InvalidArgument. Canonical values are config 1-3, n in {25, 50},
  // rho in {0.3, 0.6}, p = 200, snr = 10.
  void validate() const;
};

struct GroundTruth {
  Vector b;
  std::vector<int> labels;  // 0..3 for the active blocks, 4 for every other variable
  double sigma_eps2 = 0.0;
  Matrix Sigma;
};

inline constexpr int kActiveBlocks = 4;
inline constexpr int kBlockWidth = 5;

Vector true_coefficients(int p = 200);

std::vector<int> true_labels(int p = 200);

/// Unit-diagonal covariance. Throws NotPositiveDefinite if the Cholesky
/// factorization fails.
Matrix build_covariance(int config, double rho, int p = 200);

/// b' Sigma b / snr.
double noise_variance(const Matrix& Sigma, const Vector& b, double snr);

struct SimulatedData {
  Dataset data;
  GroundTruth truth;
};

/// Rows of X are N(0, Sigma) through the Cholesky factor; y = X b + eps.
/// Draws come from the "data" stream keyed on the replicate.
SimulatedData generate_dataset(const SimSpec& spec);

/// The twelve canonical settings: config x rho x n.
std::vector<SimSpec> canonical_specs(std::uint64_t seed = 1);

}  // namespace vcpcr
