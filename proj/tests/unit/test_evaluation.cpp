#include <doctest.h>

#include "test_util.hpp"
#include "vcpcr/errors.hpp"
#include "vcpcr/evaluation.hpp"

using namespace vcpcr;

TEST_CASE("MCC of a hand-computed confusion table") {
  const ConfusionCounts c{2, 3, 1, 0};
  CHECK(std::abs(mcc(c) - 6.0 / std::sqrt(72.0)) <= 1e-12);
  CHECK(mcc({5, 5, 0, 0}) == 1.0);
  CHECK(mcc({0, 0, 5, 5}) == -1.0);
  CHECK(mcc({4, 0, 2, 0}) == 0.0);
}

TEST_CASE("MSEP is the mean squared difference") {
  Vector y(3), yhat(3);
  y << 1, 2, 3;
  yhat << 1, 2, 5;
  CHECK(std::abs(msep(y, yhat) - 4.0 / 3.0) <= 1e-12);
  CHECK(msep(y, y) == 0.0);
  Vector shifted = (y.array() + 0.5).matrix();
  CHECK(std::abs(msep(y, shifted) - 0.25) <= 1e-12);
  CHECK_THROWS_AS(msep(y, Vector::Zero(2)), DimensionMismatch);
}

TEST_CASE("model size counts nonzero coefficients") {
  Vector b(5);
  b << 0, 1, -2, 0, 1e-300;
  CHECK(model_size(b) == 3);
  Vector a(3);
  a << 0.5, 0, -1;
  CHECK(model_size(a, {4, 2, 3}) == 7);
}

TEST_CASE("support MCC compares nonzero patterns") {
  Vector truth(6), est(6);
  truth << 1, 1, 0, 0, 0, 0;
  est << 2, 0, 1, 0, 0, 0;
  const ConfusionCounts c = support_counts(est, truth);
  CHECK(c.tp == 1);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 3);
  CHECK(std::abs(support_mcc(est, truth) - (3.0 - 1.0) / std::sqrt(2.0 * 2.0 * 4.0 * 4.0)) <= 1e-12);
}

TEST_CASE("pair MCC on a hand-enumerated four-variable case") {
  // Pairs: (1,2) TP, (1,3) FP, (2,3) FP, (3,4) FN, (1,4) TN, (2,4) TN.
  const std::vector<int> truth{0, 0, 1, 1};
  const std::vector<int> est{0, 0, 0, 1};
  const ConfusionCounts c = cluster_pair_counts(est, truth);
  CHECK(c.tp == 1);
  CHECK(c.fp == 2);
  CHECK(c.fn == 1);
  CHECK(c.tn == 2);
  CHECK(std::abs(cluster_pair_mcc(est, truth)) <= 1e-12);
  CHECK(cluster_pair_mcc(truth, truth) == 1.0);
  CHECK(cluster_pair_mcc({5, 5, 9, 9}, truth) == 1.0);
}

TEST_CASE("pair conventions differ only for unassigned variables") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> est{0, 0, 1, 1, -1, -1};
  CHECK(cluster_pair_mcc(est, truth, PairConvention::Linked) == 1.0);
  CHECK(cluster_pair_mcc(est, truth, PairConvention::Unlinked) < 1.0);
  const std::vector<int> assigned{3, 3, 1, 1, 2, 2};
  CHECK(cluster_pair_mcc(assigned, truth, PairConvention::Linked) ==
        cluster_pair_mcc(assigned, truth, PairConvention::Unlinked));
  CHECK(pair_convention_from_string("unlinked") == PairConvention::Unlinked);
  CHECK_THROWS_AS(pair_convention_from_string("both"), InvalidArgument);
}

TEST_CASE("pair MCC is invariant to relabelling") {
  Rng rng = Rng::stream(1, "test");
  std::vector<int> truth(30), est(30);
  for (int j = 0; j < 30; ++j) {
    truth[j] = static_cast<int>(rng.below(4));
    est[j] = static_cast<int>(rng.below(5)) - 1;
  }
  std::vector<int> relabelled = est;
  for (int& l : relabelled)
    if (l >= 0) l = 10 - l;
  for (auto conv : {PairConvention::Linked, PairConvention::Unlinked})
    CHECK(cluster_pair_mcc(est, truth, conv) == cluster_pair_mcc(relabelled, truth, conv));
}
