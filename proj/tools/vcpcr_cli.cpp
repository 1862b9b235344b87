// vcpcr command-line tool: simulate | fit | cv | benchmark | metrics.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "vcpcr/baselines.hpp"
#include "vcpcr/cv_harness.hpp"
#include "vcpcr/errors.hpp"
#include "vcpcr/evaluation.hpp"
#include "vcpcr/io.hpp"
#include "vcpcr/serialize.hpp"
#include "vcpcr/simulation.hpp"
#include "vcpcr/solvers.hpp"
#include "vcpcr/vcpcr.hpp"

namespace fs = std::filesystem;
using namespace vcpcr;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kIO = 3 };

std::string default_output_dir() {
  const char* env = std::getenv("VCPCR_OUTPUT_DIR");
  return env && *env ? env : "vcpcr-out";
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_json(const std::string& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

Json load_json_file(const std::string& path) { return parse_json(read_file(path), path); }

// Values from --config-file are applied before argv is parsed, so explicit
// flags override them.
std::optional<std::string> find_config_file(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config-file" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config-file=", 0) == 0) return arg.substr(14);
  }
  return std::nullopt;
}

template <typename T>
void from_file(const Json& file, const char* key, T& target) {
  if (!file.contains(key)) return;
  try {
    target = file.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config file: bad value for '") + key + "'");
  }
}

template <typename T>
void from_file(const Json& file, const char* key, std::optional<T>& target) {
  if (!file.contains(key) || file.at(key).is_null()) return;
  T value{};
  from_file(file, key, value);
  target = value;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  int config = 3;
  int n = 50;
  double rho = 0.6;
  double snr = 10.0;
  std::uint64_t seed = 1;
  std::uint64_t replicate = 0;
  bool allow_noncanonical = false;
  std::optional<double> sigma_eps;
  std::string out = default_output_dir();

  void load(const Json& f) {
    from_file(f, "config", config);
    from_file(f, "n", n);
    from_file(f, "rho", rho);
    from_file(f, "snr", snr);
    from_file(f, "seed", seed);
    from_file(f, "replicate", replicate);
    from_file(f, "allow_noncanonical", allow_noncanonical);
    from_file(f, "sigma_eps", sigma_eps);
    from_file(f, "out", out);
  }
};

int run_simulate(const SimulateArgs& args) {
  SimSpec spec;
  spec.config = args.config;
  spec.n = args.n;
  spec.rho = args.rho;
  spec.snr = args.snr;
  spec.seed = args.seed;
  spec.replicate = args.replicate;
  spec.allow_noncanonical = args.allow_noncanonical;
  spec.sigma_eps_override = args.sigma_eps;
  const SimulatedData sim = generate_dataset(spec);
  fs::create_directories(args.out);
  write_csv(join(args.out, "data.csv"), sim.data);
  write_json(join(args.out, "truth.json"), truth_to_json(sim.truth, spec));
  Json resolved{{"command", "simulate"}, {"version", kVersion}, {"simulation", sim_spec_to_json(spec)},
                {"out", args.out}};
  write_json(join(args.out, "resolved-config.json"), resolved);
  std::printf("wrote %s (n=%d, p=%d, sigma_eps2=%s)\n", join(args.out, "data.csv").c_str(), spec.n, spec.p,
              format_double(sim.truth.sigma_eps2).c_str());
  return kOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string data;
  std::string response_column = "y";
  std::string task = "regression";
  std::string method;
  int K = 5;
  std::optional<double> lambda;
  std::optional<double> lambda_ratio;
  std::optional<double> delta;
  std::optional<double> delta_ratio;
  double cen_lambda = 1.0;
  std::uint64_t seed = 1;
  std::string truth;
  std::string pair_convention = "linked";
  std::string out = default_output_dir();

  void load(const Json& f) {
    from_file(f, "data", data);
    from_file(f, "response_column", response_column);
    from_file(f, "task", task);
    from_file(f, "method", method);
    from_file(f, "K", K);
    from_file(f, "lambda", lambda);
    from_file(f, "lambda_ratio", lambda_ratio);
    from_file(f, "delta", delta);
    from_file(f, "delta_ratio", delta_ratio);
    from_file(f, "cen_lambda", cen_lambda);
    from_file(f, "seed", seed);
    from_file(f, "truth", truth);
    from_file(f, "pair_convention", pair_convention);
    from_file(f, "out", out);
  }

  Json to_json() const {
    return Json{{"command", "fit"},
                {"version", kVersion},
                {"data", data},
                {"response_column", response_column},
                {"task", task},
                {"method", method},
                {"K", K},
                {"lambda", optional_json(lambda)},
                {"lambda_ratio", optional_json(lambda_ratio)},
                {"delta", optional_json(delta)},
                {"delta_ratio", optional_json(delta_ratio)},
                {"cen_lambda", cen_lambda},
                {"seed", seed},
                {"truth", truth},
                {"pair_convention", pair_convention},
                {"out", out}};
  }
};

MetricReport report_for(const Vector& b, const std::vector<int>& labels, const TruthInfo& truth,
                        PairConvention convention) {
  MetricReport report;
  report.model_size = model_size(b);
  if (truth.b.size() == b.size()) report.support_mcc = support_mcc(b, truth.b);
  if (!truth.labels.empty() && truth.labels.size() == labels.size()) {
    report.cluster_mcc = cluster_pair_mcc(labels, truth.labels, convention);
    report.cluster_mcc_unlinked = cluster_pair_mcc(labels, truth.labels, PairConvention::Unlinked);
  }
  return report;
}

int run_fit(const FitArgs& args) {
  if (args.data.empty()) throw InvalidArgument("--data is required");
  if (args.lambda && args.lambda_ratio) throw InvalidArgument("give at most one of --lambda and --lambda-ratio");
  if (args.delta && args.delta_ratio) throw InvalidArgument("give at most one of --delta and --delta-ratio");
  const Method method = method_from_string(args.method);
  const PairConvention convention = pair_convention_from_string(args.pair_convention);
  const Task task = task_from_string(args.task);
  const Dataset data = load_csv(args.data, args.response_column, task);
  data.validate();
  if (args.K < 1 || args.K > data.p()) throw InvalidArgument("K must lie in [1, p]");

  const StandardizedMatrix Xs = standardize(data.X);
  const StandardizedResponse ys = standardize_response(data.y, task);
  const std::uint64_t seed = init_seed(args.seed, 0);
  Json fit_json;
  Vector b;
  std::vector<int> labels;

  switch (method) {
    case Method::VcpcrRidge:
    case Method::VcpcrLasso:
    case Method::VcpcrIdentity: {
      WeightScheme scheme = WeightScheme::identity();
      if (method == Method::VcpcrRidge) {
        if (args.delta_ratio) throw InvalidArgument("ridge weights take an absolute --delta");
        scheme = WeightScheme::ridge(args.delta.value_or(1.0));
      } else if (method == Method::VcpcrLasso) {
        double delta = args.delta.value_or(0.0);
        if (!args.delta) {
          const double dmax = task == Task::Regression ? lasso_delta_max(Xs.values, ys.values)
                                                       : logistic_lasso_delta_max(Xs.values, ys.values);
          delta = args.delta_ratio.value_or(0.1) * dmax;
        }
        scheme = WeightScheme::lasso(delta);
      }
      const Partition partition = random_balanced_partition(static_cast<int>(data.p()), args.K, seed);
      const WeightVector w = compute_weights(Xs.values, ys.values, task, scheme);
      double lambda = 0.0;
      if (args.lambda) {
        lambda = *args.lambda;
      } else {
        lambda = args.lambda_ratio.value_or(0.3) * lambda_max(Xs.values, w, partition);
      }
      VcpcrFit fit = fit_vcpcr_weighted(Xs.values, ys.values, task, w, partition, lambda);
      fit.scheme = scheme;
      fit.x_center = Xs.center;
      fit.x_scale = Xs.scale;
      fit.y_center = ys.center;
      fit.y_scale = ys.scale;
      fit_json = fit_to_json(fit, args.method);
      b = fit.b;
      labels = fit.labels();
      break;
    }
    case Method::CrlKmeans:
    case Method::CrlWard: {
      if (task != Task::Regression) throw InvalidArgument(args.method + " supports regression only");
      const Clusterer clusterer = method == Method::CrlKmeans ? Clusterer::Kmeans : Clusterer::Ward;
      const Partition partition = crl_cluster(Xs.values, clusterer, args.K, seed);
      const double delta =
          args.delta ? *args.delta : args.delta_ratio.value_or(0.1) * crl_delta_max(Xs.values, ys.values, partition);
      const CrlFit fit = crl_fit_with_partition(Xs.values, ys.values, partition, delta);
      fit_json = fit_to_json(fit, args.method);
      attach_standardization(fit_json, Xs.center, Xs.scale, ys.center, ys.scale);
      b = fit.b;
      labels = fit.selected_labels();
      break;
    }
    case Method::Cen: {
      if (task != Task::Regression) throw InvalidArgument("cen supports regression only");
      const double delta =
          args.delta ? *args.delta : args.delta_ratio.value_or(0.1) * cen_delta_max(Xs.values, ys.values);
      const CenFit fit = cen_fit(Xs.values, ys.values, args.K, delta, args.cen_lambda, seed);
      fit_json = fit_to_json(fit, args.method);
      attach_standardization(fit_json, Xs.center, Xs.scale, ys.center, ys.scale);
      b = fit.b;
      labels = fit.selected_labels();
      break;
    }
    case Method::Ols:
      throw InvalidArgument("ols is a cross-validation control, not a fit method");
  }

  fs::create_directories(args.out);
  write_json(join(args.out, "fit.json"), fit_json);
  write_json(join(args.out, "resolved-config.json"), args.to_json());
  std::printf("fit %s: model size %d\n", args.method.c_str(), model_size(b));
  if (!args.truth.empty()) {
    const TruthInfo truth = truth_from_json(load_json_file(args.truth));
    const Json report = metric_report_to_json(report_for(b, labels, truth, convention));
    write_json(join(args.out, "metrics.json"), report);
    std::printf("%s\n", report.dump().c_str());
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// cv

struct CvArgs {
  std::string data;
  std::string response_column = "y";
  std::string task = "regression";
  std::string method;
  std::string truth;
  std::string grid_file;
  Json grid_overrides = Json::object();
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out = default_output_dir();

  void load(const Json& f) {
    from_file(f, "data", data);
    from_file(f, "response_column", response_column);
    from_file(f, "task", task);
    from_file(f, "method", method);
    from_file(f, "truth", truth);
    from_file(f, "grid_file", grid_file);
    from_file(f, "seed", seed);
    from_file(f, "jobs", jobs);
    from_file(f, "out", out);
    if (f.contains("grid")) grid_overrides = f.at("grid");
  }
};

int run_cv(const CvArgs& args) {
  if (args.data.empty()) throw InvalidArgument("--data is required");
  const Method method = method_from_string(args.method);
  GridSpec grid = grid_from_json(args.grid_overrides);
  if (!args.grid_file.empty()) grid = grid_from_json(load_json_file(args.grid_file), grid);
  grid.seed = args.seed;
  grid.jobs = args.jobs;
  grid.validate();
  const Dataset data = load_csv(args.data, args.response_column, task_from_string(args.task));
  std::optional<TruthInfo> truth;
  if (!args.truth.empty()) truth = truth_from_json(load_json_file(args.truth));

  const CvResult result = nested_cv(data, method, grid, truth, fs::path(args.data).stem().string());
  fs::create_directories(args.out);
  write_file_atomic(join(args.out, "results.jsonl"), rows_to_jsonl(result.rows));
  write_file_atomic(join(args.out, "folds.jsonl"), folds_to_jsonl(result.folds));
  write_file_atomic(join(args.out, "summary.csv"), rows_to_csv(result.rows));
  Json resolved{{"command", "cv"},   {"version", kVersion},        {"data", args.data},
                {"task", args.task}, {"response_column", args.response_column}, {"method", args.method},
                {"truth", args.truth}, {"grid", grid_to_json(grid)}, {"out", args.out}};
  write_json(join(args.out, "resolved-config.json"), resolved);
  std::printf("%s", rows_to_csv(result.rows).c_str());
  return kOk;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
  std::string spec;
  std::string out = default_output_dir();
  int jobs = 1;
  bool resume = false;
  std::optional<std::uint64_t> seed;

  void load(const Json& f) {
    from_file(f, "spec", spec);
    from_file(f, "out", out);
    from_file(f, "jobs", jobs);
    from_file(f, "resume", resume);
    from_file(f, "seed", seed);
  }
};

struct BenchmarkCell {
  std::string key;
  std::string setting;
  Method method = Method::VcpcrRidge;
  std::optional<SimSpec> simulation;
  Json dataset;  // {path, response_column, task, name} when not simulated
};

std::string setting_name(const SimSpec& spec) {
  return "config" + std::to_string(spec.config) + "_rho" + format_double(spec.rho) + "_n" +
         std::to_string(spec.n) + "_rep" + std::to_string(spec.replicate);
}

std::vector<BenchmarkCell> expand_cells(const Json& spec, std::uint64_t seed) {
  static const std::set<std::string> known{"seed",     "methods",  "simulations", "canonical",
                                           "replicates", "datasets", "grid",        "description"};
  if (!spec.is_object()) throw InvalidArgument("benchmark spec must be a JSON object");
  for (const auto& item : spec.items())
    if (!known.count(item.key())) throw InvalidArgument("unknown benchmark spec key '" + item.key() + "'");
  if (!spec.contains("methods") || !spec.at("methods").is_array() || spec.at("methods").empty())
    throw InvalidArgument("benchmark spec needs a non-empty 'methods' list");
  std::vector<Method> methods;
  for (const auto& m : spec.at("methods")) methods.push_back(method_from_string(m.get<std::string>()));
  const int replicates = spec.value("replicates", 1);
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");

  std::vector<SimSpec> sims;
  if (spec.value("canonical", false)) sims = canonical_specs(seed);
  if (spec.contains("simulations"))
    for (const auto& s : spec.at("simulations")) {
      SimSpec base;
      base.seed = seed;
      sims.push_back(sim_spec_from_json(s, base));
    }
  std::vector<BenchmarkCell> cells;
  for (const SimSpec& base : sims)
    for (int r = 0; r < replicates; ++r) {
      SimSpec sim = base;
      sim.seed = seed;
      sim.replicate = static_cast<std::uint64_t>(r);
      sim.validate();
      for (Method m : methods) {
        BenchmarkCell cell;
        cell.setting = setting_name(sim);
        cell.method = m;
        cell.simulation = sim;
        cell.key = cell.setting + "__" + to_string(m);
        cells.push_back(std::move(cell));
      }
    }
  if (spec.contains("datasets"))
    for (const auto& d : spec.at("datasets")) {
      if (!d.contains("path")) throw InvalidArgument("dataset entries need a 'path'");
      const std::string name = d.value("name", fs::path(d.at("path").get<std::string>()).stem().string());
      for (Method m : methods) {
        BenchmarkCell cell;
        cell.setting = name;
        cell.method = m;
        cell.dataset = d;
        cell.key = name + "__" + to_string(m);
        cells.push_back(std::move(cell));
      }
    }
  if (cells.empty()) throw InvalidArgument("benchmark spec lists no simulations or datasets");
  return cells;
}

std::vector<BenchmarkRow> run_cell(const BenchmarkCell& cell, const GridSpec& grid) {
  if (cell.simulation) {
    const SimulatedData sim = generate_dataset(*cell.simulation);
    const TruthInfo truth{sim.truth.b, sim.truth.labels};
    return nested_cv(sim.data, cell.method, grid, truth, cell.setting).rows;
  }
  const Dataset data = load_csv(cell.dataset.at("path").get<std::string>(),
                                cell.dataset.value("response_column", std::string("y")),
                                task_from_string(cell.dataset.value("task", std::string("regression"))));
  std::optional<TruthInfo> truth;
  if (cell.dataset.contains("truth"))
    truth = truth_from_json(load_json_file(cell.dataset.at("truth").get<std::string>()));
  return nested_cv(data, cell.method, grid, truth, cell.setting).rows;
}

int run_benchmark(const BenchmarkArgs& args) {
  if (args.spec.empty()) throw InvalidArgument("--spec is required");
  if (args.jobs < 1) throw InvalidArgument("--jobs must be at least 1");
  const Json spec = load_json_file(args.spec);
  const std::uint64_t seed = args.seed.value_or(spec.value("seed", std::uint64_t{1}));
  GridSpec grid = spec.contains("grid") ? grid_from_json(spec.at("grid")) : GridSpec{};
  grid.seed = seed;
  grid.jobs = 1;
  const std::vector<BenchmarkCell> cells = expand_cells(spec, seed);

  const std::string cell_dir = join(args.out, "cells");
  fs::create_directories(cell_dir);
  Json resolved{{"command", "benchmark"}, {"version", kVersion}, {"spec", spec},   {"seed", seed},
                {"grid", grid_to_json(grid)}, {"jobs", args.jobs}, {"out", args.out}};
  write_json(join(args.out, "resolved-config.json"), resolved);

  std::vector<std::string> failures(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const BenchmarkCell& cell = cells[i];
      const std::string path = join(cell_dir, cell.key + ".jsonl");
      if (args.resume && fs::exists(path)) {
        ++done;
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        write_file_atomic(path, rows_to_jsonl(run_cell(cell, grid)));
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::lock_guard<std::mutex> lock(log_mutex);
      std::fprintf(stderr, "[%zu/%zu] %s %s (%.1f s)\n", ++done, cells.size(), cell.key.c_str(),
                   failures[i].empty() ? "done" : ("FAILED: " + failures[i]).c_str(), seconds);
    }
  };
  const int threads = std::min<int>(args.jobs, static_cast<int>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  // Assemble in cell order so output is independent of completion order.
  std::vector<BenchmarkRow> rows;
  std::string jsonl;
  Json failed = Json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string path = join(cell_dir, cells[i].key + ".jsonl");
    if (!failures[i].empty() || !fs::exists(path)) {
      failed.push_back({{"cell", cells[i].key}, {"error", failures[i]}});
      continue;
    }
    const std::string text = read_file(path);
    jsonl += text;
    std::size_t start = 0;
    while (start < text.size()) {
      const std::size_t end = text.find('\n', start);
      const std::string line = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (!line.empty()) rows.push_back(row_from_json(parse_json(line, path)));
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  write_file_atomic(join(args.out, "results.jsonl"), jsonl);
  write_file_atomic(join(args.out, "summary.csv"), rows_to_csv(rows));
  if (!failed.empty()) {
    write_json(join(args.out, "failures.json"), failed);
    std::fprintf(stderr, "%zu of %zu cells failed; see failures.json\n", failed.size(), cells.size());
    return kNumerical;
  }
  std::printf("%zu cells, %zu rows written to %s\n", cells.size(), rows.size(), args.out.c_str());
  return kOk;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsArgs {
  std::string fit;
  std::string truth;
  std::string data;
  std::string response_column = "y";
  std::string pair_convention = "linked";
  std::string out;

  void load(const Json& f) {
    from_file(f, "fit", fit);
    from_file(f, "truth", truth);
    from_file(f, "data", data);
    from_file(f, "response_column", response_column);
    from_file(f, "pair_convention", pair_convention);
    from_file(f, "out", out);
  }
};

int run_metrics(const MetricsArgs& args) {
  if (args.fit.empty()) throw InvalidArgument("--fit is required");
  const Json fit = load_json_file(args.fit);
  const Vector b = vector_from_json(fit.at("b"));
  const std::vector<int> labels = labels_from_json(fit.at("labels"));
  const PairConvention convention = pair_convention_from_string(args.pair_convention);
  MetricReport report;
  report.model_size = model_size(b);
  if (!args.truth.empty())
    report = report_for(b, labels, truth_from_json(load_json_file(args.truth)), convention);
  if (!args.data.empty()) {
    const Task task = task_from_string(fit.value("task", std::string("regression")));
    const Dataset data = load_csv(args.data, args.response_column, task);
    if (!fit.contains("standardization")) throw InvalidArgument("fit JSON lacks standardization parameters");
    const Json& s = fit.at("standardization");
    const Matrix X = apply_standardization(data.X, vector_from_json(s.at("x_center")), vector_from_json(s.at("x_scale")));
    Vector eta = X * b;
    eta.array() += fit.value("intercept", 0.0);
    Vector pred = eta;
    if (task == Task::Classification) {
      pred = eta.unaryExpr([](double e) { return logistic(e); });
    } else {
      pred = (eta.array() * s.at("y_scale").get<double>() + s.at("y_center").get<double>()).matrix();
    }
    report.msep = msep(data.y, pred);
  }
  const Json j = metric_report_to_json(report);
  std::printf("%s\n", j.dump().c_str());
  if (!args.out.empty()) {
    fs::create_directories(args.out);
    write_json(join(args.out, "metrics.json"), j);
    Json resolved{{"command", "metrics"}, {"version", kVersion}, {"fit", args.fit},
                  {"truth", args.truth},  {"data", args.data},   {"pair_convention", args.pair_convention}};
    write_json(join(args.out, "resolved-config.json"), resolved);
  }
  return kOk;
}

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Usage: return kUsage;
    case ErrorCategory::Numerical: return kNumerical;
    case ErrorCategory::IO: return kIO;
  }
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VC-PCR: supervised variable clustering and latent regression"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim_args;
  FitArgs fit_args;
  CvArgs cv_args;
  BenchmarkArgs bench_args;
  MetricsArgs metrics_args;
  std::string config_file;

  try {
    if (const auto path = find_config_file(argc, argv)) {
      const Json file = load_json_file(*path);
      if (!file.is_object()) throw InvalidArgument("config file must hold a JSON object");
      sim_args.load(file);
      fit_args.load(file);
      cv_args.load(file);
      bench_args.load(file);
      metrics_args.load(file);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.category());
  }

  auto* simulate = app.add_subcommand("simulate", "Generate a simulated dataset and its ground truth");
  simulate->add_option("--config", sim_args.config, "Correlation configuration (1, 2 or 3)");
  simulate->add_option("--n", sim_args.n, "Number of observations");
  simulate->add_option("--rho", sim_args.rho, "Within-block correlation");
  simulate->add_option("--snr", sim_args.snr, "Signal-to-noise ratio");
  simulate->add_option("--seed", sim_args.seed, "Run seed");
  simulate->add_option("--replicate", sim_args.replicate, "Replicate index (data stream key)");
  simulate->add_flag("--allow-noncanonical", sim_args.allow_noncanonical, "Permit settings outside the design");
  simulate->add_option("--sigma-eps", sim_args.sigma_eps, "Override the noise standard deviation");
  simulate->add_option("--out", sim_args.out, "Output directory (default $VCPCR_OUTPUT_DIR or ./vcpcr-out)");
  simulate->add_option("--config-file", config_file, "JSON file with default flag values");

  auto* fit = app.add_subcommand("fit", "Fit one model with fixed hyperparameters");
  fit->add_option("--data", fit_args.data, "CSV file with a header row");
  fit->add_option("--response-column", fit_args.response_column, "Name of the response column");
  fit->add_option("--task", fit_args.task, "regression or classification");
  fit->add_option("--method", fit_args.method,
                  "vcpcr-ridge | vcpcr-lasso | vcpcr-identity | crl-kmeans | crl-ward | cen");
  fit->add_option("--K", fit_args.K, "Number of initial clusters");
  fit->add_option("--lambda", fit_args.lambda, "Sparsity level (VC-PCR)");
  fit->add_option("--lambda-ratio", fit_args.lambda_ratio, "Sparsity level as a fraction of lambda_max (default 0.3)");
  fit->add_option("--delta", fit_args.delta, "Weight penalty (VC-PCR) or lasso penalty (CRL, CEN)");
  fit->add_option("--delta-ratio", fit_args.delta_ratio, "Penalty as a fraction of delta_max (default 0.1)");
  fit->add_option("--cen-lambda", fit_args.cen_lambda, "CEN grouping penalty");
  fit->add_option("--seed", fit_args.seed, "Run seed");
  fit->add_option("--truth", fit_args.truth, "truth.json from simulate; adds metrics.json");
  fit->add_option("--pair-convention", fit_args.pair_convention, "linked or unlinked");
  fit->add_option("--out", fit_args.out, "Output directory");
  fit->add_option("--config-file", config_file, "JSON file with default flag values");

  auto* cv = app.add_subcommand("cv", "Nested cross-validation of one method on one dataset");
  cv->add_option("--data", cv_args.data, "CSV file with a header row");
  cv->add_option("--response-column", cv_args.response_column, "Name of the response column");
  cv->add_option("--task", cv_args.task, "regression or classification");
  cv->add_option("--method", cv_args.method, "Method name (see fit) or ols");
  cv->add_option("--truth", cv_args.truth, "truth.json for support and cluster recovery");
  cv->add_option("--grid", cv_args.grid_file, "JSON grid specification");
  cv->add_option("--seed", cv_args.seed, "Run seed");
  cv->add_option("--jobs", cv_args.jobs, "Worker threads");
  cv->add_option("--out", cv_args.out, "Output directory");
  cv->add_option("--config-file", config_file, "JSON file with default flag values");

  auto* bench = app.add_subcommand("benchmark", "Run nested CV over simulation settings and methods");
  bench->add_option("--spec", bench_args.spec, "Benchmark specification (JSON)");
  bench->add_option("--out", bench_args.out, "Output directory");
  bench->add_option("--jobs", bench_args.jobs, "Cells run concurrently");
  bench->add_flag("--resume", bench_args.resume, "Skip cells whose results already exist");
  bench->add_option("--seed", bench_args.seed, "Override the spec seed");
  bench->add_option("--config-file", config_file, "JSON file with default flag values");

  auto* metrics = app.add_subcommand("metrics", "Evaluate a fit against ground truth and/or data");
  metrics->add_option("--fit", metrics_args.fit, "fit.json");
  metrics->add_option("--truth", metrics_args.truth, "truth.json");
  metrics->add_option("--data", metrics_args.data, "CSV for prediction error");
  metrics->add_option("--response-column", metrics_args.response_column, "Name of the response column");
  metrics->add_option("--pair-convention", metrics_args.pair_convention, "linked or unlinked");
  metrics->add_option("--out", metrics_args.out, "Directory for metrics.json");
  metrics->add_option("--config-file", config_file, "JSON file with default flag values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim_args);
    if (*fit) return run_fit(fit_args);
    if (*cv) return run_cv(cv_args);
    if (*bench) return run_benchmark(bench_args);
    if (*metrics) return run_metrics(metrics_args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.category());
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "error: malformed JSON input: %s\n", e.what());
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIO;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
  return kUsage;
}
