#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vcpcr/data.hpp"

namespace vcpcr {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
};

/// Mean squared error of prediction. Throws DimensionMismatch or
/// InvalidArgument for empty input.
double msep(const Vector& y_true, const Vector& y_pred);

/// Number of nonzero coefficients.
int model_size(const Vector& b);

/// Cluster-level size: sum of cluster sizes over clusters with a_k != 0.
int model_size(const Vector& a, const std::vector<int>& cluster_sizes);

/// Matthews correlation; 0 when any marginal is empty.
double mcc(const ConfusionCounts& counts);

/// Positive class: nonzero coefficient.
ConfusionCounts support_counts(const Vector& b_hat, const Vector& b_true);
double support_mcc(const Vector& b_hat, const Vector& b_true);

// How predicted variables with label -1 (removed from the model) are paired.
//   Linked:   they form one extra predicted cluster, mirroring the ground
//             truth where every inactive variable shares one cluster.
//   Unlinked: they are never paired with anything.
enum class PairConvention { Linked, Unlinked };

const char* to_string(PairConvention convention);
PairConvention pair_convention_from_string(const std::string& name);

/// Counts over all p(p-1)/2 variable pairs; positive = same cluster.
/// labels_true must not contain -1.
ConfusionCounts cluster_pair_counts(const std::vector<int>& labels_hat, const std::vector<int>& labels_true,
                                    PairConvention convention = PairConvention::Linked);

double cluster_pair_mcc(const std::vector<int>& labels_hat, const std::vector<int>& labels_true,
                        PairConvention convention = PairConvention::Linked);

struct MetricReport {
  std::optional<double> msep;
  int model_size = 0;
  std::optional<double> support_mcc;
  std::optional<double> cluster_mcc;
  std::optional<double> cluster_mcc_unlinked;
};

}  // namespace vcpcr
