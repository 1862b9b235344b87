// Acceptance run: one PASS/FAIL line per criterion on stdout, diagnostics on
// stderr. Exit status is nonzero when any criterion fails.
//
// VCPCR_ACCEPTANCE_REPLICATES overrides the replicate count of the
// simulation study (default 10) for quick local runs.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "vcpcr/baselines.hpp"
#include "vcpcr/cv_harness.hpp"
#include "vcpcr/errors.hpp"
#include "vcpcr/evaluation.hpp"
#include "vcpcr/serialize.hpp"
#include "vcpcr/simulation.hpp"
#include "vcpcr/solvers.hpp"

using namespace vcpcr;
using namespace vcpcr::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

// ---------------------------------------------------------------------------

Outcome membership_oracle() {
  const auto start = Clock::now();
  Rng rng = Rng::stream(101, "acceptance");
  int instances = 0, rows = 0, mismatches = 0;
  double worst = 0.0;
  for (; instances < 200; ++instances) {
    const Index n = 4 + static_cast<Index>(rng.below(9));
    const Index p = 2 + static_cast<Index>(rng.below(9));
    const int K = 1 + static_cast<int>(rng.below(std::min<Index>(3, p)));
    const Matrix X = random_standardized(rng, n, p);
    const WeightVector w = random_weights(rng, p);
    const LatentMatrix U = update_latent(X, w, init_membership(random_partition(rng, static_cast<int>(p), K)));
    const double lambda = rng.uniform() < 0.2 ? 0.0 : 0.5 * rng.uniform();
    const MembershipMatrix V = update_membership(X, w, U, lambda);
    for (Index j = 0; j < p; ++j, ++rows) {
      const RowOracle oracle = brute_force_row(X, w, U.values, j, lambda);
      int column = -1;
      for (Index c = 0; c < V.clusters(); ++c)
        if (V.values(j, c) > 0.0) column = static_cast<int>(c);
      const double value = row_objective(X, w, U.values, j, column, column < 0 ? 0.0 : V.values(j, column), lambda);
      if (column != oracle.column) ++mismatches;
      worst = std::max(worst, std::abs(value - oracle.value));
    }
  }
  const double elapsed = seconds_since(start);
  Outcome out;
  out.pass = mismatches == 0 && worst <= 1e-10 && elapsed < 10.0;
  out.detail = std::to_string(instances) + " instances, " + std::to_string(rows) + " rows, " +
               std::to_string(mismatches) + " assignment mismatches, " + fmt("max value gap %.2e, %.2f s", worst, elapsed);
  return out;
}

Outcome structural_invariants() {
  Rng rng = Rng::stream(102, "acceptance");
  std::vector<std::pair<VcpcrFit, Matrix>> fits;
  std::vector<double> starts;
  auto add = [&](const Matrix& X, const Vector& y, Task task, const WeightScheme& scheme, const Partition& part,
                 double ratio) {
    const WeightVector w = compute_weights(X, y, task, scheme);
    const double lambda = ratio * lambda_max(X, w, part);
    try {
      VcpcrFit fit = fit_vcpcr_weighted(X, y, task, w, part, lambda);
      starts.push_back(initial_objective(X, w, part, lambda));
      fits.emplace_back(std::move(fit), X);
    } catch (const AllVariablesRemoved&) {
    }
  };
  const WeightScheme schemes[] = {WeightScheme::identity(), WeightScheme::ridge(0.1), WeightScheme::lasso(0.02)};
  for (int i = 0; i < 90; ++i) {
    const Index n = 10 + static_cast<Index>(rng.below(30));
    const Index p = 6 + static_cast<Index>(rng.below(20));
    const int K = 2 + static_cast<int>(rng.below(3));
    const Matrix X = random_standardized(rng, n, p);
    const bool classify = i % 5 == 4;
    Vector y(n);
    for (Index r = 0; r < n; ++r) {
      const double signal = X(r, 0) - X(r, 1) + 0.5 * rng.normal();
      y(r) = classify ? (signal > 0 ? 1.0 : 0.0) : signal;
    }
    if (!classify) y = standardize_response(y, Task::Regression).values;
    add(X, y, classify ? Task::Classification : Task::Regression, schemes[i % 3],
        random_partition(rng, static_cast<int>(p), K), 0.9 * rng.uniform());
  }
  for (const SimSpec& spec : canonical_specs()) {
    const SimulatedData sim = generate_dataset(spec);
    const Matrix X = standardize(sim.data.X).values;
    const Vector y = standardize_response(sim.data.y, Task::Regression).values;
    for (const WeightScheme& scheme : {WeightScheme::identity(), WeightScheme::ridge(1.0), WeightScheme::lasso(0.05)})
      add(X, y, Task::Regression, scheme, random_balanced_partition(200, 5, spec.config), 0.3);
  }
  int violations = 0;
  std::string first;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    std::string v = structural_violation(fits[i].first, fits[i].second);
    if (v.empty() && fits[i].first.sosnmf.objective_trace.back() > starts[i] + 1e-12) v = "objective above start";
    if (!v.empty()) {
      ++violations;
      if (first.empty()) first = v;
    }
  }
  Outcome out;
  out.pass = violations == 0 && fits.size() >= 100;
  out.detail = std::to_string(fits.size()) + " fits, " + std::to_string(violations) + " violations" +
               (first.empty() ? "" : " (first: " + first + ")");
  return out;
}

Outcome lambda_max_threshold() {
  Rng rng = Rng::stream(103, "acceptance");
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const Index n = 8 + static_cast<Index>(rng.below(30));
    const Index p = 4 + static_cast<Index>(rng.below(30));
    const int K = 1 + static_cast<int>(rng.below(4));
    const Matrix X = random_standardized(rng, n, p);
    const WeightVector w = random_weights(rng, p);
    const Partition part = random_partition(rng, static_cast<int>(p), K);
    const double lmax = lambda_max(X, w, part);
    const LatentMatrix U = update_latent(X, w, init_membership(part));
    bool ok = update_membership(X, w, U, lmax).all_zero();
    ok = ok && update_membership(X, w, U, 0.99 * lmax).assigned_count() >= 1;
    try {
      fit_sosnmf(X, w, part, lmax);
      ok = false;
    } catch (const AllVariablesRemoved&) {
    }
    if (!ok) ++failures;
  }
  return {failures == 0, "50 triples, " + std::to_string(failures) + " failures"};
}

Outcome noise_calibration() {
  double worst = 0.0;
  for (const SimSpec& spec : canonical_specs()) {
    const SimulatedData sim = generate_dataset(spec);
    const double ratio = sim.truth.b.dot(sim.truth.Sigma * sim.truth.b) / sim.truth.sigma_eps2;
    worst = std::max(worst, std::abs(ratio - 10.0));
  }
  const Vector b = true_coefficients();
  const double s06 = noise_variance(build_covariance(3, 0.6), b, 10.0);
  const double s03 = noise_variance(build_covariance(3, 0.3), b, 10.0);
  const bool pass = worst <= 1e-10 && std::abs(s06 - 6.8) <= 1e-10 && std::abs(s03 - 4.4) <= 1e-10;
  return {pass, fmt("max |SNR - 10| = %.2e, sigma_eps2 = %.12g (rho 0.6), %.12g (rho 0.3)", worst, s06, s03)};
}

Outcome cen_descent() {
  Rng rng = Rng::stream(107, "acceptance");
  int increases = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Index n = 15 + static_cast<Index>(rng.below(20));
    const Index p = 6 + static_cast<Index>(rng.below(10));
    const int K = 2 + static_cast<int>(rng.below(3));
    const Matrix X = random_standardized(rng, n, p);
    const Vector y = X.col(0) - X.col(1) + random_vector(rng, n);
    const double delta = (0.02 + 0.3 * rng.uniform()) * cen_delta_max(X, y);
    const CenFit fit = cen_fit(X, y, K, delta, 0.1 + 5.0 * rng.uniform(), static_cast<std::uint64_t>(i));
    for (std::size_t t = 1; t < fit.objective_trace.size(); ++t)
      if (fit.objective_trace[t] > fit.objective_trace[t - 1] + 1e-8) ++increases;
    const CenFit plain = cen_fit(X, y, K, delta, 0.0, static_cast<std::uint64_t>(i));
    LassoOptions options;
    options.tol = 1e-15;
    const LinearFit lasso = lasso_fit(X, y, delta / static_cast<double>(n), options);
    worst_gap = std::max(worst_gap, (plain.b - lasso.coefficients).cwiseAbs().maxCoeff());
  }
  return {increases == 0 && worst_gap <= 1e-6,
          std::to_string(increases) + " objective increases, " + fmt("max |b_cen - b_lasso| = %.2e", worst_gap)};
}

Outcome clustering_oracles() {
  Rng rng = Rng::stream(108, "acceptance");
  int misses = 0;
  for (int i = 0; i < 30; ++i) {
    const std::vector<int> groups = i % 2 ? std::vector<int>{0, 0, 1, 1, 2, 2} : std::vector<int>{0, 1, 2, 0, 0, 1};
    const Matrix Z = planted_columns(rng, 3, groups, 0.3 + rng.uniform());
    const int K = 2 + i % 2;
    const double best = best_wcss(Z, K);
    const KmeansResult km = kmeans_columns(Z, K, static_cast<std::uint64_t>(i));
    if (std::abs(km.wcss - best) > 1e-10 * std::max(1.0, best)) ++misses;
  }
  Matrix X = Matrix::Zero(2, 5);
  X.row(0) << 0, 1, 3, 7, 15;
  const Dendrogram tree = ward_linkage(X);
  const double expected[] = {1.0, std::sqrt(25.0 / 3.0), std::sqrt(289.0 / 6.0), std::sqrt(240.1)};
  double worst = 0.0;
  for (int m = 0; m < 4; ++m) worst = std::max(worst, std::abs(tree.merges[static_cast<std::size_t>(m)].height - expected[m]));
  return {misses == 0 && worst <= 1e-10,
          "k-means " + std::to_string(misses) + "/30 off the enumerated optimum, " + fmt("Ward max height error %.2e", worst)};
}

Outcome metric_oracles() {
  double worst = std::abs(mcc({2, 3, 1, 0}) - 6.0 / std::sqrt(72.0));
  worst = std::max(worst, std::abs(cluster_pair_mcc({0, 0, 0, 1}, {0, 0, 1, 1})));
  Vector y(3), a(3), b(3);
  y << 1, 2, 3;
  a << 1, 2, 5;
  b << 0.5, 2.5, 3.5;
  worst = std::max(worst, std::abs(msep(y, a) - 4.0 / 3.0));
  worst = std::max(worst, std::abs(msep(y, b) - 0.25));
  worst = std::max(worst, std::abs(msep(y, y)));
  return {worst <= 1e-12, fmt("max deviation %.2e", worst)};
}

// ---------------------------------------------------------------------------
// Simulation study shared by criteria 5, 6 and 10.

struct MethodSummary {
  double best_support = -1.0;
  double size_at_best_support = 0.0;
  double best_cluster = -1.0;
  double best_cluster_unlinked = -1.0;
  double min_msep = std::numeric_limits<double>::infinity();
  double seconds = 0.0;
};

MethodSummary summarize(const CvResult& result, double seconds) {
  MethodSummary s;
  s.seconds = seconds;
  for (const BenchmarkRow& row : result.rows) {
    if (row.support_mcc && *row.support_mcc > s.best_support) {
      s.best_support = *row.support_mcc;
      s.size_at_best_support = row.model_size;
    }
    if (row.cluster_mcc) s.best_cluster = std::max(s.best_cluster, *row.cluster_mcc);
    if (row.cluster_mcc_unlinked) s.best_cluster_unlinked = std::max(s.best_cluster_unlinked, *row.cluster_mcc_unlinked);
    s.min_msep = std::min(s.min_msep, row.msep);
  }
  return s;
}

struct Replicate {
  MethodSummary ridge, identity, crl;
};

struct Study {
  std::vector<Replicate> replicates;
  CvResult first_ridge;
  CvResult first_crl;
};

SimSpec study_spec(int replicate) {
  SimSpec spec;
  spec.config = 3;
  spec.n = 50;
  spec.rho = 0.6;
  spec.seed = 1;
  spec.replicate = static_cast<std::uint64_t>(replicate);
  return spec;
}

Study run_study(int count) {
  Study study;
  const GridSpec grid;
  for (int r = 0; r < count; ++r) {
    const SimulatedData sim = generate_dataset(study_spec(r));
    const TruthInfo truth{sim.truth.b, sim.truth.labels};
    Replicate rep;
    auto timed = [&](Method method, MethodSummary& target, CvResult* keep) {
      const auto start = Clock::now();
      CvResult result = nested_cv(sim.data, method, grid, truth, "replicate" + std::to_string(r));
      target = summarize(result, seconds_since(start));
      if (keep) *keep = std::move(result);
    };
    timed(Method::VcpcrRidge, rep.ridge, r == 0 ? &study.first_ridge : nullptr);
    timed(Method::VcpcrIdentity, rep.identity, nullptr);
    timed(Method::CrlKmeans, rep.crl, r == 0 ? &study.first_crl : nullptr);
    std::fprintf(stderr,
                 "replicate %d: ridge support %.3f at s=%.1f, cluster %.3f (unlinked %.3f), msep %.3f, %.1f s | "
                 "identity support %.3f, %.1f s | crl-kmeans cluster %.3f (unlinked %.3f), msep %.3f, %.1f s\n",
                 r, rep.ridge.best_support, rep.ridge.size_at_best_support, rep.ridge.best_cluster,
                 rep.ridge.best_cluster_unlinked, rep.ridge.min_msep, rep.ridge.seconds, rep.identity.best_support,
                 rep.identity.seconds, rep.crl.best_cluster, rep.crl.best_cluster_unlinked, rep.crl.min_msep,
                 rep.crl.seconds);
    study.replicates.push_back(rep);
  }
  return study;
}

struct OrderingOutcome {
  Outcome a, b, c;
};

OrderingOutcome ordering(const Study& study) {
  const int n = static_cast<int>(study.replicates.size());
  const int allowed = n * 2 / 10;
  int fail_a = 0, fail_b = 0, fail_c = 0, slow = 0;
  double sum_support = 0.0, sum_size = 0.0, sum_gap = 0.0, sum_gap_unlinked = 0.0, sum_ridge_msep = 0.0,
         sum_crl_msep = 0.0;
  for (const Replicate& r : study.replicates) {
    if (!(r.ridge.best_support >= 0.8 && r.ridge.size_at_best_support >= 15.0 && r.ridge.size_at_best_support <= 30.0))
      ++fail_a;
    if (!(r.ridge.best_cluster - r.crl.best_cluster >= 0.05)) ++fail_b;
    if (!(r.ridge.min_msep <= r.crl.min_msep)) ++fail_c;
    if (r.ridge.seconds + r.identity.seconds + r.crl.seconds >= 300.0) ++slow;
    sum_support += r.ridge.best_support;
    sum_size += r.ridge.size_at_best_support;
    sum_gap += r.ridge.best_cluster - r.crl.best_cluster;
    sum_gap_unlinked += r.ridge.best_cluster_unlinked - r.crl.best_cluster_unlinked;
    sum_ridge_msep += r.ridge.min_msep;
    sum_crl_msep += r.crl.min_msep;
  }
  const double m = std::max(1, n);
  const std::string reps = "/" + std::to_string(n) + " replicates failed";
  const std::string timing = slow ? ", " + std::to_string(slow) + " replicates over 5 min" : "";
  OrderingOutcome out;
  out.a = {fail_a <= allowed && slow == 0,
           std::to_string(fail_a) + reps + fmt(", mean best support MCC %.3f at mean s %.1f", sum_support / m, sum_size / m) + timing};
  out.b = {fail_b <= allowed,
           std::to_string(fail_b) + reps +
               fmt(", mean cluster MCC gap %.3f linked, %.3f unlinked", sum_gap / m, sum_gap_unlinked / m)};
  out.c = {fail_c <= allowed,
           std::to_string(fail_c) + reps + fmt(", mean min MSEP %.3f (ridge) vs %.3f (crl-kmeans)", sum_ridge_msep / m, sum_crl_msep / m)};
  return out;
}

Outcome identity_degradation(const Study& study) {
  double gap = 0.0;
  for (const Replicate& r : study.replicates) gap += r.ridge.best_support - r.identity.best_support;
  gap /= std::max<std::size_t>(1, study.replicates.size());
  return {gap >= 0.1, fmt("mean best support MCC gap %.3f (ridge minus identity)", gap)};
}

Outcome cv_hygiene(const Study& study) {
  std::size_t checked = 0, leaks = 0;
  for (const CvResult* result : {&study.first_ridge, &study.first_crl})
    for (const FoldAudit& audit : result->audits) {
      const std::set<Index> test(audit.outer_test.begin(), audit.outer_test.end());
      for (Index i : audit.inner_rows) leaks += test.count(i);
      for (Index i : audit.standardization_rows) leaks += test.count(i);
      checked += audit.inner_rows.size() + audit.standardization_rows.size();
    }
  const SimulatedData sim = generate_dataset(study_spec(0));
  const TruthInfo truth{sim.truth.b, sim.truth.labels};
  const CvResult again = nested_cv(sim.data, Method::VcpcrRidge, GridSpec{}, truth, "replicate0");
  const bool identical = rows_to_jsonl(again.rows) == rows_to_jsonl(study.first_ridge.rows) &&
                         folds_to_jsonl(again.folds) == folds_to_jsonl(study.first_ridge.folds);
  return {leaks == 0 && checked > 0 && identical,
          std::to_string(checked) + " inner row reads audited, " + std::to_string(leaks) + " leaks, rerun " +
              (identical ? "byte-identical" : "differs")};
}

void report(int index, const std::string& name, const Outcome& outcome, int& failures) {
  std::printf("[%s] criterion %d: %s: %s\n", outcome.pass ? "PASS" : "FAIL", index, name.c_str(), outcome.detail.c_str());
  std::fflush(stdout);
  if (!outcome.pass) ++failures;
}

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  int failures = 0;
  report(1, "membership update vs brute force", guarded(membership_oracle), failures);
  report(2, "structural invariants", guarded(structural_invariants), failures);
  report(3, "lambda_max threshold", guarded(lambda_max_threshold), failures);
  report(4, "noise calibration", guarded(noise_calibration), failures);

  int replicates = 10;
  if (const char* env = std::getenv("VCPCR_ACCEPTANCE_REPLICATES")) replicates = std::max(1, std::atoi(env));
  Study study;
  std::string study_error;
  try {
    study = run_study(replicates);
  } catch (const std::exception& e) {
    study_error = e.what();
  }
  if (study_error.empty()) {
    const OrderingOutcome o = ordering(study);
    const bool pass = o.a.pass && o.b.pass && o.c.pass;
    report(5, "ordering vs baselines", {pass, "(a) " + o.a.detail + "; (b) " + o.b.detail + "; (c) " + o.c.detail},
           failures);
    std::fprintf(stderr, "criterion 5 parts: a=%s b=%s c=%s\n", o.a.pass ? "pass" : "fail", o.b.pass ? "pass" : "fail",
                 o.c.pass ? "pass" : "fail");
    report(6, "identity weight degradation", identity_degradation(study), failures);
  } else {
    report(5, "ordering vs baselines", {false, "exception: " + study_error}, failures);
    report(6, "identity weight degradation", {false, "exception: " + study_error}, failures);
  }

  report(7, "CEN descent and lasso limit", guarded(cen_descent), failures);
  report(8, "clustering oracles", guarded(clustering_oracles), failures);
  report(9, "metric oracles", guarded(metric_oracles), failures);
  if (study_error.empty())
    report(10, "CV hygiene", guarded([&] { return cv_hygiene(study); }), failures);
  else
    report(10, "CV hygiene", {false, "exception: " + study_error}, failures);
  return failures == 0 ? 0 : 1;
}
