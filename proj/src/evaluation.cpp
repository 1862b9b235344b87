#include "vcpcr/evaluation.hpp"

#include <cmath>
#include <string>

#include "vcpcr/errors.hpp"

namespace vcpcr {

double msep(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionMismatch("msep: lengths differ");
  if (y_true.size() == 0) throw InvalidArgument("msep: no observations");
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

int model_size(const Vector& b) { return static_cast<int>((b.array() != 0.0).count()); }

int model_size(const Vector& a, const std::vector<int>& cluster_sizes) {
  if (static_cast<std::size_t>(a.size()) != cluster_sizes.size())
    throw DimensionMismatch("model_size: one size per cluster coefficient expected");
  int s = 0;
  for (Index k = 0; k < a.size(); ++k)
    if (a(k) != 0.0) s += cluster_sizes[static_cast<std::size_t>(k)];
  return s;
}

double mcc(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double a = tp + fp;
  const double b = tp + fn;
  const double d = tn + fp;
  const double e = tn + fn;
  if (a == 0.0 || b == 0.0 || d == 0.0 || e == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(a * b * d * e);
}

ConfusionCounts support_counts(const Vector& b_hat, const Vector& b_true) {
  if (b_hat.size() != b_true.size()) throw DimensionMismatch("support_mcc: lengths differ");
  ConfusionCounts c;
  for (Index j = 0; j < b_hat.size(); ++j) {
    const bool predicted = b_hat(j) != 0.0;
    const bool actual = b_true(j) != 0.0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double support_mcc(const Vector& b_hat, const Vector& b_true) { return mcc(support_counts(b_hat, b_true)); }

const char* to_string(PairConvention convention) {
  return convention == PairConvention::Linked ? "linked" : "unlinked";
}

PairConvention pair_convention_from_string(const std::string& name) {
  if (name == "linked") return PairConvention::Linked;
  if (name == "unlinked") return PairConvention::Unlinked;
  throw InvalidArgument("unknown pair convention '" + name + "' (expected linked or unlinked)");
}

ConfusionCounts cluster_pair_counts(const std::vector<int>& labels_hat, const std::vector<int>& labels_true,
                                    PairConvention convention) {
  if (labels_hat.size() != labels_true.size()) throw DimensionMismatch("cluster_pair_mcc: lengths differ");
  ConfusionCounts c;
  const std::size_t p = labels_hat.size();
  for (std::size_t i = 0; i < p; ++i) {
    if (labels_true[i] < 0) throw InvalidArgument("true labels must all be assigned");
    for (std::size_t j = i + 1; j < p; ++j) {
      bool predicted = labels_hat[i] == labels_hat[j];
      if (labels_hat[i] < 0 && convention == PairConvention::Unlinked) predicted = false;
      const bool actual = labels_true[i] == labels_true[j];
      if (predicted && actual) ++c.tp;
      else if (predicted) ++c.fp;
      else if (actual) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

double cluster_pair_mcc(const std::vector<int>& labels_hat, const std::vector<int>& labels_true,
                        PairConvention convention) {
  return mcc(cluster_pair_counts(labels_hat, labels_true, convention));
}

}  // namespace vcpcr
