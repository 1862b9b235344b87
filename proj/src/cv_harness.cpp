#include "vcpcr/cv_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "vcpcr/errors.hpp"
#include "vcpcr/rng.hpp"
#include "vcpcr/solvers.hpp"
#include "vcpcr/vcpcr.hpp"

namespace vcpcr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MethodName {
  Method method;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {Method::VcpcrRidge, "vcpcr-ridge"}, {Method::VcpcrLasso, "vcpcr-lasso"},
    {Method::VcpcrIdentity, "vcpcr-identity"}, {Method::CrlKmeans, "crl-kmeans"},
    {Method::CrlWard, "crl-ward"}, {Method::Cen, "cen"}, {Method::Ols, "ols"},
};

bool is_vcpcr(Method method) {
  return method == Method::VcpcrRidge || method == Method::VcpcrLasso || method == Method::VcpcrIdentity;
}

CellFit failed(const std::exception& e) {
  CellFit fit;
  fit.error = e.what();
  return fit;
}

std::vector<CellFit> all_failed(std::size_t count, const std::exception& e) {
  return std::vector<CellFit>(count, failed(e));
}

// Weight vectors for every tuned delta of a VC-PCR method on one split.
std::vector<std::optional<WeightVector>> weights_for(Method method, const Matrix& X, const Vector& y, Task task,
                                                     const std::vector<double>& deltas,
                                                     std::vector<std::string>& errors) {
  std::vector<std::optional<WeightVector>> out(deltas.size());
  errors.assign(deltas.size(), "");
  if (method == Method::VcpcrIdentity) {
    for (auto& w : out) w = WeightVector::ones(X.cols());
    return out;
  }
  if (method == Method::VcpcrLasso && task == Task::Regression) {
    const double dmax = lasso_delta_max(X, y);
    std::vector<double> absolute;
    for (double r : deltas) absolute.push_back(r * dmax);
    try {
      const auto path = lasso_path(X, y, absolute);
      for (std::size_t i = 0; i < path.size(); ++i) out[i] = WeightVector{path[i].coefficients};
    } catch (const std::exception& e) {
      // Retry each point without warm starts.
      for (std::size_t i = 0; i < deltas.size(); ++i) {
        try {
          out[i] = WeightVector{lasso_fit(X, y, absolute[i]).coefficients};
        } catch (const std::exception& inner) {
          errors[i] = inner.what();
        }
      }
    }
    return out;
  }
  const double dmax = method == Method::VcpcrLasso ? logistic_lasso_delta_max(X, y) : 1.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    try {
      const double delta = method == Method::VcpcrLasso ? deltas[i] * dmax : deltas[i];
      out[i] = compute_weights(X, y, task,
                               method == Method::VcpcrLasso ? WeightScheme::lasso(delta) : WeightScheme::ridge(delta));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  return out;
}

std::vector<CellFit> vcpcr_path(const Matrix& X, const Vector& y, Task task, const WeightVector& w, int K,
                                const GridSpec& grid, std::uint64_t init_seed) {
  const std::vector<double> ratios = fixed_values(Method::VcpcrIdentity, grid);
  const Partition partition = random_balanced_partition(static_cast<int>(X.cols()), K, init_seed);
  double lam_max = 0.0;
  try {
    lam_max = lambda_max(X, w, partition);
  } catch (const std::exception& e) {
    return all_failed(ratios.size(), e);
  }
  std::vector<CellFit> out;
  out.reserve(ratios.size());
  for (double r : ratios) {
    try {
      const VcpcrFit fit = fit_vcpcr_weighted(X, y, task, w, partition, r * lam_max, grid.sosnmf);
      CellFit cell;
      cell.ok = true;
      cell.b = fit.b;
      cell.intercept = fit.intercept;
      cell.labels = fit.labels();
      out.push_back(std::move(cell));
    } catch (const std::exception& e) {
      out.push_back(failed(e));
    }
  }
  return out;
}

std::vector<CellFit> crl_path(const Matrix& X, const Vector& y, Clusterer clusterer, int K, const GridSpec& grid,
                              std::uint64_t init_seed) {
  const std::vector<double> ratios = fixed_values(Method::CrlKmeans, grid);
  try {
    const Partition partition = crl_cluster(X, clusterer, K, init_seed);
    const double dmax = crl_delta_max(X, y, partition);
    std::vector<CellFit> out;
    for (double r : ratios) {
      try {
        const CrlFit fit = crl_fit_with_partition(X, y, partition, r * dmax);
        CellFit cell;
        cell.ok = true;
        cell.b = fit.b;
        cell.labels = fit.selected_labels();
        out.push_back(std::move(cell));
      } catch (const std::exception& e) {
        out.push_back(failed(e));
      }
    }
    return out;
  } catch (const std::exception& e) {
    return all_failed(ratios.size(), e);
  }
}

std::vector<CellFit> cen_path(const Matrix& X, const Vector& y, const Combo& combo, const GridSpec& grid,
                              std::uint64_t init_seed) {
  const std::vector<double> ratios = fixed_values(Method::Cen, grid);
  const Partition partition = random_balanced_partition(static_cast<int>(X.cols()), combo.K, init_seed);
  const double dmax = cen_delta_max(X, y);
  std::vector<CellFit> out;
  for (double r : ratios) {
    try {
      const CenFit fit = cen_fit_with_partition(X, y, partition, r * dmax, combo.lambda, init_seed, grid.cen);
      CellFit cell;
      cell.ok = true;
      cell.b = fit.b;
      cell.labels = fit.selected_labels();
      out.push_back(std::move(cell));
    } catch (const std::exception& e) {
      out.push_back(failed(e));
    }
  }
  return out;
}

CellFit ols_cell(const Matrix& X, const Vector& y, Task task) {
  try {
    CellFit cell;
    if (task == Task::Regression) {
      cell.b = ols_fit(X, y).coefficients;
    } else {
      const LogisticFit fit = logistic_fit(X, y);
      cell.b = fit.coefficients;
      cell.intercept = fit.intercept;
    }
    cell.ok = true;
    return cell;
  } catch (const std::exception& e) {
    return failed(e);
  }
}

CellFit null_model(const Vector& y_train, Index p, Task task) {
  CellFit cell;
  cell.ok = true;
  cell.b = Vector::Zero(p);
  cell.labels.assign(static_cast<std::size_t>(p), -1);
  if (task == Task::Classification) {
    const double rate = std::clamp(y_train.mean(), 1e-12, 1.0 - 1e-12);
    cell.intercept = std::log(rate / (1.0 - rate));
  }
  return cell;
}

Vector predictions(const CellFit& fit, const Matrix& X, Task task) {
  Vector eta = X * fit.b;
  eta.array() += fit.intercept;
  if (task == Task::Classification) return eta.unaryExpr([](double e) { return logistic(e); });
  return eta;
}

double classification_mcc(const Vector& y, const Vector& prob) {
  ConfusionCounts c;
  for (Index i = 0; i < y.size(); ++i) {
    const bool predicted = prob(i) >= 0.5;
    const bool actual = y(i) == 1.0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return mcc(c);
}

// Lower is better.
double inner_score(const CellFit& fit, const Matrix& X, const Vector& y, Task task) {
  if (!fit.ok) return kInf;
  const Vector pred = predictions(fit, X, task);
  if (task == Task::Classification) return -classification_mcc(y, pred);
  return msep(y, pred);
}

std::vector<Index> complement(Index n, const std::vector<Index>& excluded) {
  std::vector<bool> skip(static_cast<std::size_t>(n), false);
  for (Index i : excluded) skip[static_cast<std::size_t>(i)] = true;
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (!skip[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

std::vector<Index> map_indices(const std::vector<Index>& local, const std::vector<Index>& global) {
  std::vector<Index> out;
  out.reserve(local.size());
  for (Index i : local) out.push_back(global[static_cast<std::size_t>(i)]);
  return out;
}

// All tuned combinations on one split, evaluated at every fixed value.
// results[c][f].
std::vector<std::vector<CellFit>> fit_all_combos(Method method, const Matrix& X, const Vector& y, Task task,
                                                 const std::vector<Combo>& combos, const GridSpec& grid,
                                                 std::uint64_t init_seed) {
  std::vector<std::vector<CellFit>> results(combos.size());
  if (!is_vcpcr(method)) {
    for (std::size_t c = 0; c < combos.size(); ++c)
      results[c] = fit_path(method, X, y, task, combos[c], grid, init_seed);
    return results;
  }
  // Weights depend only on delta; compute each once for all K.
  std::vector<double> deltas;
  for (const Combo& combo : combos)
    if (std::find(deltas.begin(), deltas.end(), combo.delta) == deltas.end()) deltas.push_back(combo.delta);
  std::vector<std::string> errors;
  const auto weights = weights_for(method, X, y, task, deltas, errors);
  const std::size_t n_fixed = fixed_values(method, grid).size();
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const auto d = static_cast<std::size_t>(
        std::find(deltas.begin(), deltas.end(), combos[c].delta) - deltas.begin());
    if (!weights[d]) {
      results[c] = all_failed(n_fixed, Error(ErrorCategory::Numerical, errors[d]));
      continue;
    }
    results[c] = vcpcr_path(X, y, task, *weights[d], combos[c].K, grid, init_seed);
  }
  return results;
}

struct JobOutput {
  std::vector<FoldResult> folds;
  FoldAudit audit;
};

JobOutput run_job(const Dataset& data, Method method, const GridSpec& grid, const std::optional<TruthInfo>& truth,
                  const std::vector<std::vector<Index>>& outer, int init, int m) {
  const std::uint64_t seed = init_seed(grid.seed, init);
  const std::vector<double> fixed = fixed_values(method, grid);
  const std::vector<Combo> combos = tuned_combos(method, grid);
  const Task task = data.task;

  JobOutput out;
  FoldAudit& audit = out.audit;
  audit.init = init;
  audit.outer_fold = m;
  audit.outer_test = outer[static_cast<std::size_t>(m)];
  std::sort(audit.outer_test.begin(), audit.outer_test.end());
  audit.outer_train = complement(data.n(), audit.outer_test);
  const Dataset train = take_rows(data, audit.outer_train);

  // Inner loop: only rows of `train` are visible here.
  const auto inner = make_folds(train.n(), grid.inner_folds, grid.seed, static_cast<std::uint64_t>(m) + 1);
  std::vector<std::vector<double>> score_sum(fixed.size(), std::vector<double>(combos.size(), 0.0));
  std::vector<std::vector<double>> size_sum(fixed.size(), std::vector<double>(combos.size(), 0.0));
  std::set<Index> inner_rows;
  for (const auto& val_local : inner) {
    std::vector<Index> val = val_local;
    std::sort(val.begin(), val.end());
    const std::vector<Index> fit_rows = complement(train.n(), val);
    for (Index i : map_indices(fit_rows, audit.outer_train)) inner_rows.insert(i);
    for (Index i : map_indices(val, audit.outer_train)) inner_rows.insert(i);

    const Dataset fit_part = take_rows(train, fit_rows);
    const Dataset val_part = take_rows(train, val);
    const StandardizedMatrix Xs = standardize(fit_part.X);
    const StandardizedResponse ys = standardize_response(fit_part.y, task);
    const Matrix Xv = apply_standardization(val_part.X, Xs.center, Xs.scale);
    const Vector yv = apply_response_standardization(val_part.y, ys);

    const auto results = fit_all_combos(method, Xs.values, ys.values, task, combos, grid, seed);
    for (std::size_t c = 0; c < combos.size(); ++c)
      for (std::size_t f = 0; f < fixed.size(); ++f) {
        const CellFit& cell = results[c][f];
        score_sum[f][c] += inner_score(cell, Xv, yv, task);
        size_sum[f][c] += cell.ok ? static_cast<double>(model_size(cell.b)) : 0.0;
      }
  }
  audit.inner_rows.assign(inner_rows.begin(), inner_rows.end());

  // Selection per fixed value: lowest mean score, then smaller model, then
  // combo order.
  const double folds = static_cast<double>(inner.size());
  std::vector<int> selected(fixed.size(), -1);
  std::vector<FoldResult> rows(fixed.size());
  for (std::size_t f = 0; f < fixed.size(); ++f) {
    FoldResult& row = rows[f];
    row.init = init;
    row.outer_fold = m;
    row.fixed_index = static_cast<int>(f);
    row.fixed_value = fixed[f];
    for (std::size_t c = 0; c < combos.size(); ++c) {
      row.inner_scores.push_back(score_sum[f][c] / folds);
      row.inner_sizes.push_back(size_sum[f][c] / folds);
    }
    int best = -1;
    for (std::size_t c = 0; c < combos.size(); ++c) {
      const double s = row.inner_scores[c];
      if (!std::isfinite(s)) continue;
      if (best < 0) {
        best = static_cast<int>(c);
        continue;
      }
      const double bs = row.inner_scores[static_cast<std::size_t>(best)];
      if (s < bs || (s == bs && row.inner_sizes[c] < row.inner_sizes[static_cast<std::size_t>(best)]))
        best = static_cast<int>(c);
    }
    selected[f] = best;
    row.selected_combo = best;
    if (best >= 0) row.combo = combos[static_cast<std::size_t>(best)];
  }

  // Refit on the whole outer-training split, evaluate on the held-out fold.
  audit.standardization_rows = audit.outer_train;
  const StandardizedMatrix Xs = standardize(train.X);
  const StandardizedResponse ys = standardize_response(train.y, task);
  const Dataset test = take_rows(data, audit.outer_test);
  const Matrix Xt = apply_standardization(test.X, Xs.center, Xs.scale);
  const Vector yt = apply_response_standardization(test.y, ys);

  std::map<int, std::vector<CellFit>> refits;
  for (int c : selected)
    if (c >= 0 && !refits.count(c)) {
      std::vector<Combo> one{combos[static_cast<std::size_t>(c)]};
      refits[c] = fit_all_combos(method, Xs.values, ys.values, task, one, grid, seed).front();
    }

  for (std::size_t f = 0; f < fixed.size(); ++f) {
    FoldResult& row = rows[f];
    CellFit cell;
    if (selected[f] >= 0) cell = refits[selected[f]][f];
    if (!cell.ok) {
      cell = null_model(ys.values, data.p(), task);
      row.null_model = true;
    }
    const Vector pred = predictions(cell, Xt, task);
    row.msep = msep(yt, pred);
    if (task == Task::Classification) row.prediction_mcc = classification_mcc(yt, pred);
    row.model_size = model_size(cell.b);
    if (truth) {
      if (truth->b.size() == cell.b.size()) row.support_mcc = support_mcc(cell.b, truth->b);
      if (!truth->labels.empty() && cell.labels.size() == truth->labels.size()) {
        row.cluster_mcc = cluster_pair_mcc(cell.labels, truth->labels, grid.pair_convention);
        row.cluster_mcc_unlinked = cluster_pair_mcc(cell.labels, truth->labels, PairConvention::Unlinked);
      }
    }
  }
  out.folds = std::move(rows);
  return out;
}

double mean_of(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values) total += v;
  return values.empty() ? 0.0 : total / static_cast<double>(values.size());
}

// Mean over outer folds within each init, then over inits.
std::optional<double> nested_mean(const std::vector<std::vector<std::optional<double>>>& by_init) {
  std::vector<double> init_means;
  for (const auto& folds : by_init) {
    std::vector<double> values;
    for (const auto& v : folds)
      if (v) values.push_back(*v);
    if (values.empty()) return std::nullopt;
    init_means.push_back(mean_of(values));
  }
  if (init_means.empty()) return std::nullopt;
  return mean_of(init_means);
}

}  // namespace

std::string to_string(Method method) {
  for (const auto& entry : kMethodNames)
    if (entry.method == method) return entry.name;
  return "unknown";
}

Method method_from_string(const std::string& name) {
  for (const auto& entry : kMethodNames)
    if (name == entry.name) return entry.method;
  throw InvalidArgument("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::VcpcrRidge, Method::VcpcrLasso, Method::VcpcrIdentity,
                                           Method::CrlKmeans,  Method::CrlWard,    Method::Cen};
  return methods;
}

bool uses_initial_partition(Method method) {
  return is_vcpcr(method) || method == Method::Cen || method == Method::CrlKmeans;
}

void GridSpec::validate() const {
  if (grid_size < 1) throw InvalidArgument("grid_size must be at least 1");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio <= 1.0)) throw InvalidArgument("lambda_min_ratio must be in (0, 1]");
  if (!(delta_min_ratio > 0.0 && delta_min_ratio <= 1.0)) throw InvalidArgument("delta_min_ratio must be in (0, 1]");
  if (!(ridge_delta_min > 0.0 && ridge_delta_max >= ridge_delta_min))
    throw InvalidArgument("ridge delta range must satisfy 0 < min <= max");
  if (!(cen_lambda_min >= 0.0 && cen_lambda_max >= cen_lambda_min))
    throw InvalidArgument("CEN lambda range must satisfy 0 <= min <= max");
  if (K_grid.empty()) throw InvalidArgument("K grid is empty");
  for (int K : K_grid)
    if (K < 1) throw InvalidArgument("K values must be positive");
  if (n_inits < 1) throw InvalidArgument("n_inits must be at least 1");
  if (outer_folds < 2 || inner_folds < 2) throw InvalidArgument("fold counts must be at least 2");
  if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
}

std::uint64_t init_seed(std::uint64_t seed, int init) {
  return Rng::stream(seed, "inits", {static_cast<std::uint64_t>(init)}).next_u64();
}

std::vector<double> geometric_grid(double hi, double lo, int count) {
  if (count < 1) throw InvalidArgument("grid needs at least one value");
  if (!(hi > 0.0) || !(lo > 0.0) || lo > hi) throw InvalidArgument("geometric grid needs 0 < lo <= hi");
  std::vector<double> grid(static_cast<std::size_t>(count));
  grid.front() = hi;
  if (count == 1) return grid;
  const double log_ratio = std::log(lo / hi);
  for (int i = 1; i < count - 1; ++i)
    grid[static_cast<std::size_t>(i)] = hi * std::exp(log_ratio * i / (count - 1));
  grid.back() = lo;
  return grid;
}

std::vector<std::vector<Index>> make_folds(Index n, int k, std::uint64_t seed, std::uint64_t key) {
  if (k < 1) throw InvalidArgument("fold count must be positive");
  if (k > n) throw TooFewSamples("more folds than observations");
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng::stream(seed, "folds", {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k), key});
  rng.shuffle(order);
  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % static_cast<std::size_t>(k)].push_back(order[i]);
  return folds;
}

std::vector<double> lambda_grid_for(const Matrix& X, const WeightVector& w, const Partition& partition, int count,
                                    double min_ratio) {
  const double hi = lambda_max(X, w, partition);
  if (!(hi > 0.0)) throw AllVariablesRemoved();
  return geometric_grid(hi, hi * min_ratio, count);
}

std::vector<Combo> tuned_combos(Method method, const GridSpec& grid) {
  std::vector<Combo> combos;
  std::vector<int> Ks = grid.K_grid;
  std::sort(Ks.begin(), Ks.end());
  switch (method) {
    case Method::VcpcrRidge:
    case Method::VcpcrLasso: {
      const auto deltas = method == Method::VcpcrRidge
                              ? geometric_grid(grid.ridge_delta_max, grid.ridge_delta_min, grid.grid_size)
                              : geometric_grid(1.0, grid.delta_min_ratio, grid.grid_size);
      for (double d : deltas)
        for (int K : Ks) combos.push_back({K, d, 0.0});
      break;
    }
    case Method::VcpcrIdentity:
    case Method::CrlKmeans:
    case Method::CrlWard:
      for (int K : Ks) combos.push_back({K, 0.0, 0.0});
      break;
    case Method::Cen: {
      std::vector<double> lambdas =
          grid.cen_lambda_min > 0.0 ? geometric_grid(grid.cen_lambda_max, grid.cen_lambda_min, grid.grid_size)
                                    : std::vector<double>{0.0};
      std::sort(lambdas.begin(), lambdas.end());
      for (double l : lambdas)
        for (int K : Ks) combos.push_back({K, 0.0, l});
      break;
    }
    case Method::Ols:
      combos.push_back({});
      break;
  }
  return combos;
}

std::vector<double> fixed_values(Method method, const GridSpec& grid) {
  if (is_vcpcr(method)) return geometric_grid(1.0, grid.lambda_min_ratio, grid.grid_size);
  if (method == Method::Ols) return {0.0};
  return geometric_grid(1.0, grid.delta_min_ratio, grid.grid_size);
}

std::string fixed_hp_name(Method method) {
  if (is_vcpcr(method)) return "lambda_ratio";
  if (method == Method::Ols) return "none";
  return "delta_ratio";
}

std::vector<CellFit> fit_path(Method method, const Matrix& X, const Vector& y, Task task, const Combo& combo,
                              const GridSpec& grid, std::uint64_t init_seed) {
  switch (method) {
    case Method::VcpcrRidge:
    case Method::VcpcrLasso:
    case Method::VcpcrIdentity: {
      std::vector<std::string> errors;
      const auto w = weights_for(method, X, y, task, {combo.delta}, errors);
      if (!w.front())
        return all_failed(fixed_values(method, grid).size(), Error(ErrorCategory::Numerical, errors.front()));
      return vcpcr_path(X, y, task, *w.front(), combo.K, grid, init_seed);
    }
    case Method::CrlKmeans:
      return crl_path(X, y, Clusterer::Kmeans, combo.K, grid, init_seed);
    case Method::CrlWard:
      return crl_path(X, y, Clusterer::Ward, combo.K, grid, init_seed);
    case Method::Cen:
      return cen_path(X, y, combo, grid, init_seed);
    case Method::Ols:
      return {ols_cell(X, y, task)};
  }
  return {};
}

CvResult nested_cv(const Dataset& data, Method method, const GridSpec& grid, const std::optional<TruthInfo>& truth,
                   const std::string& setting) {
  grid.validate();
  data.validate();
  if (data.task == Task::Classification && (method == Method::CrlKmeans || method == Method::CrlWard ||
                                            method == Method::Cen))
    throw InvalidArgument(to_string(method) + " supports regression only");
  if (data.n() < grid.outer_folds) throw TooFewSamples("fewer observations than outer folds");
  for (int K : grid.K_grid)
    if (K > data.p()) throw InvalidArgument("K exceeds the number of variables");

  const int n_inits = uses_initial_partition(method) ? grid.n_inits : 1;
  const auto outer = make_folds(data.n(), grid.outer_folds, grid.seed, 0);
  const std::size_t n_jobs = static_cast<std::size_t>(n_inits) * outer.size();

  std::vector<JobOutput> outputs(n_jobs);
  std::vector<std::exception_ptr> failures(n_jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < n_jobs; j = next++) {
      const int init = static_cast<int>(j / outer.size());
      const int m = static_cast<int>(j % outer.size());
      try {
        outputs[j] = run_job(data, method, grid, truth, outer, init, m);
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
  };
  const int threads = std::min<int>(grid.jobs, static_cast<int>(n_jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  CvResult result;
  for (auto& output : outputs) {
    for (auto& fold : output.folds) result.folds.push_back(std::move(fold));
    result.audits.push_back(std::move(output.audit));
  }

  const std::vector<double> fixed = fixed_values(method, grid);
  for (std::size_t f = 0; f < fixed.size(); ++f) {
    BenchmarkRow row;
    row.method = to_string(method);
    row.setting = setting;
    row.fixed_hp_name = fixed_hp_name(method);
    row.fixed_hp_index = static_cast<int>(f);
    row.fixed_hp_value = fixed[f];
    row.n_folds = static_cast<int>(outer.size());
    row.n_inits = n_inits;
    std::vector<std::vector<std::optional<double>>> size(static_cast<std::size_t>(n_inits)), err(size),
        pmcc(size), smcc(size), cmcc(size), cmcc_u(size);
    for (const FoldResult& fold : result.folds) {
      if (fold.fixed_index != static_cast<int>(f)) continue;
      const auto r = static_cast<std::size_t>(fold.init);
      size[r].push_back(static_cast<double>(fold.model_size));
      err[r].push_back(fold.msep);
      pmcc[r].push_back(fold.prediction_mcc);
      smcc[r].push_back(fold.support_mcc);
      cmcc[r].push_back(fold.cluster_mcc);
      cmcc_u[r].push_back(fold.cluster_mcc_unlinked);
      if (fold.null_model) ++row.null_model_folds;
    }
    row.model_size = nested_mean(size).value_or(0.0);
    row.msep = nested_mean(err).value_or(0.0);
    row.prediction_mcc = nested_mean(pmcc);
    row.support_mcc = nested_mean(smcc);
    row.cluster_mcc = nested_mean(cmcc);
    row.cluster_mcc_unlinked = nested_mean(cmcc_u);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace vcpcr
