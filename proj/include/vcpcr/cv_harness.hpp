#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vcpcr/baselines.hpp"
#include "vcpcr/data.hpp"
#include "vcpcr/evaluation.hpp"
#include "vcpcr/sosnmf.hpp"

namespace vcpcr {

enum class Method { VcpcrRidge, VcpcrLasso, VcpcrIdentity, CrlKmeans, CrlWard, Cen, Ols };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
const std::vector<Method>& all_methods();

/// Whether the method depends on a random initialization (initial partition
/// or k-means seeding) and so is repeated over `n_inits`.
bool uses_initial_partition(Method method);

// Hyperparameter grids and fold layout.
//
// Sparsity parameters whose useful range depends on the training data are
// given as ratios of their data-dependent maximum: the VC-PCR lambda grid runs
// from lambda_max down to lambda_max * lambda_min_ratio, and the lasso weight,
// CRL and CEN delta grids run from delta_max down to delta_max *
// delta_min_ratio. The ridge weight delta and the CEN grouping lambda use
// absolute geometric grids.
struct GridSpec {
  int grid_size = 10;
  double lambda_min_ratio = 0.01;
  double delta_min_ratio = 1e-3;
  double ridge_delta_min = 1e-3;
  double ridge_delta_max = 1e2;
  double cen_lambda_min = 1e-2;
  double cen_lambda_max = 1e1;
  std::vector<int> K_grid{4, 5, 6};
  int n_inits = 5;
  int outer_folds = 10;
  int inner_folds = 5;
  std::uint64_t seed = 1;
  PairConvention pair_convention = PairConvention::Linked;
  SosnmfOptions sosnmf;
  CenOptions cen;
  int jobs = 1;

  void validate() const;
};

/// Seed for initialization `init` (initial partition or k-means seeding).
std::uint64_t init_seed(std::uint64_t seed, int init);

/// Largest first; count == 1 gives {hi}.
std::vector<double> geometric_grid(double hi, double lo, int count);

/// k disjoint folds covering 0..n-1 with sizes differing by at most one.
/// Throws TooFewSamples when k > n.
std::vector<std::vector<Index>> make_folds(Index n, int k, std::uint64_t seed, std::uint64_t key = 0);

/// lambda_max(X, w, partition) down to lambda_max * min_ratio, geometric.
std::vector<double> lambda_grid_for(const Matrix& X, const WeightVector& w, const Partition& partition,
                                    int count = 10, double min_ratio = 0.01);

struct TruthInfo {
  Vector b;
  std::vector<int> labels;
};

// One fitted model on standardized training data.
struct CellFit {
  bool ok = false;
  std::string error;
  Vector b;
  double intercept = 0.0;
  std::vector<int> labels;  // -1 for variables outside the model
};

// Tuned (non-fixed) hyperparameters of one grid cell.
struct Combo {
  int K = 0;
  double delta = 0.0;   // VC-PCR weight penalty: ratio of delta_max (lasso), absolute (ridge)
  double lambda = 0.0;  // grouping penalty (CEN)
};

/// Tuned combinations in preference order: earlier entries win exact ties.
std::vector<Combo> tuned_combos(Method method, const GridSpec& grid);

/// Values of the held-fixed hyperparameter (ratios for lambda/delta).
std::vector<double> fixed_values(Method method, const GridSpec& grid);
std::string fixed_hp_name(Method method);

/// Fits one tuned combination at every fixed value on standardized data.
std::vector<CellFit> fit_path(Method method, const Matrix& X, const Vector& y, Task task, const Combo& combo,
                              const GridSpec& grid, std::uint64_t init_seed);

struct FoldResult {
  int init = 0;
  int outer_fold = 0;
  int fixed_index = 0;
  double fixed_value = 0.0;
  int selected_combo = -1;  // -1: every cell failed, null model used
  Combo combo;
  bool null_model = false;
  std::vector<double> inner_scores;  // mean inner score per combo (+inf for failures)
  std::vector<double> inner_sizes;
  double msep = 0.0;
  int model_size = 0;
  std::optional<double> prediction_mcc;  // classification only
  std::optional<double> support_mcc;
  std::optional<double> cluster_mcc;
  std::optional<double> cluster_mcc_unlinked;
};

struct FoldAudit {
  int init = 0;
  int outer_fold = 0;
  std::vector<Index> outer_test;
  std::vector<Index> outer_train;
  std::vector<Index> inner_rows;  // every row read by the inner loop (global indices)
  std::vector<Index> standardization_rows;  // rows used to standardize the refit
};

struct BenchmarkRow {
  std::string method;
  std::string setting;  // free-form label of the dataset / simulation cell
  std::string fixed_hp_name;
  int fixed_hp_index = 0;
  double fixed_hp_value = 0.0;
  double model_size = 0.0;
  double msep = 0.0;
  std::optional<double> prediction_mcc;
  std::optional<double> support_mcc;
  std::optional<double> cluster_mcc;
  std::optional<double> cluster_mcc_unlinked;
  int n_folds = 0;
  int n_inits = 0;
  int null_model_folds = 0;
};

struct CvResult {
  std::vector<BenchmarkRow> rows;
  std::vector<FoldResult> folds;
  std::vector<FoldAudit> audits;
};

/// Nested cross-validation with fold-local standardization. Regression
/// scores are MSEP on the standardized response of the training split;
/// classification inner selection maximizes MCC of the 0.5-thresholded
/// probabilities and reports the Brier score in `msep`.
CvResult nested_cv(const Dataset& data, Method method, const GridSpec& grid,
                   const std::optional<TruthInfo>& truth = std::nullopt, const std::string& setting = "");

}  // namespace vcpcr
