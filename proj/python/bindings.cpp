#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "vcpcr/baselines.hpp"
#include "vcpcr/cv_harness.hpp"
#include "vcpcr/errors.hpp"
#include "vcpcr/evaluation.hpp"
#include "vcpcr/serialize.hpp"
#include "vcpcr/simulation.hpp"
#include "vcpcr/solvers.hpp"
#include "vcpcr/vcpcr.hpp"

namespace py = pybind11;
using namespace vcpcr;

namespace {

WeightScheme scheme_from(const std::string& weights, double delta) {
  if (weights == "identity") return WeightScheme::identity();
  if (weights == "ridge") return WeightScheme::ridge(delta);
  if (weights == "lasso") return WeightScheme::lasso(delta);
  throw InvalidArgument("unknown weight scheme '" + weights + "'");
}

Partition partition_from(const std::optional<std::vector<int>>& labels, int p, int K, std::uint64_t seed) {
  if (!labels) return random_balanced_partition(p, K, seed);
  Partition part = canonicalize(*labels);
  part.validate();
  return part;
}

Dataset dataset_from(const Matrix& X, const Vector& y, const std::string& task) {
  Dataset data;
  data.X = X;
  data.y = y;
  data.task = task_from_string(task);
  data.validate();
  return data;
}

// Fits VC-PCR on raw data; returns the fit JSON document as a string.
std::string fit_vcpcr_json(const Matrix& X, const Vector& y, const std::string& task, const std::string& weights,
                           double delta, int K, std::optional<double> lambda, double lambda_ratio, std::uint64_t seed,
                           const std::optional<std::vector<int>>& partition) {
  const Dataset data = dataset_from(X, y, task);
  const Partition part = partition_from(partition, static_cast<int>(data.p()), K, seed);
  const WeightScheme scheme = scheme_from(weights, delta);
  const StandardizedMatrix Xs = standardize(data.X);
  const StandardizedResponse ys = standardize_response(data.y, data.task);
  const WeightVector w = compute_weights(Xs.values, ys.values, data.task, scheme);
  const double lam = lambda ? *lambda : lambda_ratio * vcpcr::lambda_max(Xs.values, w, part);
  VcpcrFit fit = fit_vcpcr_weighted(Xs.values, ys.values, data.task, w, part, lam);
  fit.scheme = scheme;
  fit.x_center = Xs.center;
  fit.x_scale = Xs.scale;
  fit.y_center = ys.center;
  fit.y_scale = ys.scale;
  return fit_to_json(fit, "vcpcr-" + weights).dump();
}

std::string fit_crl_json(const Matrix& X, const Vector& y, const std::string& clusterer, int K, double delta_ratio,
                         std::uint64_t seed) {
  const Dataset data = dataset_from(X, y, "regression");
  const StandardizedMatrix Xs = standardize(data.X);
  const StandardizedResponse ys = standardize_response(data.y, data.task);
  if (clusterer != "kmeans" && clusterer != "ward") throw InvalidArgument("clusterer must be kmeans or ward");
  const Partition part = crl_cluster(Xs.values, clusterer == "ward" ? Clusterer::Ward : Clusterer::Kmeans, K, seed);
  const CrlFit fit =
      crl_fit_with_partition(Xs.values, ys.values, part, delta_ratio * crl_delta_max(Xs.values, ys.values, part));
  Json j = fit_to_json(fit, "crl-" + clusterer);
  attach_standardization(j, Xs.center, Xs.scale, ys.center, ys.scale);
  return j.dump();
}

std::string fit_cen_json(const Matrix& X, const Vector& y, int K, double delta_ratio, double lambda,
                         std::uint64_t seed) {
  const Dataset data = dataset_from(X, y, "regression");
  const StandardizedMatrix Xs = standardize(data.X);
  const StandardizedResponse ys = standardize_response(data.y, data.task);
  const CenFit fit =
      cen_fit(Xs.values, ys.values, K, delta_ratio * cen_delta_max(Xs.values, ys.values), lambda, seed);
  Json j = fit_to_json(fit, "cen");
  attach_standardization(j, Xs.center, Xs.scale, ys.center, ys.scale);
  return j.dump();
}

py::tuple simulate(int config, int n, double rho, std::uint64_t seed, std::uint64_t replicate, bool allow_noncanonical) {
  SimSpec spec;
  spec.config = config;
  spec.n = n;
  spec.rho = rho;
  spec.seed = seed;
  spec.replicate = replicate;
  spec.allow_noncanonical = allow_noncanonical;
  const SimulatedData sim = generate_dataset(spec);
  return py::make_tuple(sim.data.X, sim.data.y, truth_to_json(sim.truth, spec).dump());
}

std::string nested_cv_json(const Matrix& X, const Vector& y, const std::string& task, const std::string& method,
                           const std::string& grid_json, const std::optional<std::string>& truth_json) {
  const Dataset data = dataset_from(X, y, task);
  const GridSpec grid = grid_from_json(parse_json(grid_json, "grid"));
  std::optional<TruthInfo> truth;
  if (truth_json) truth = truth_from_json(parse_json(*truth_json, "truth"));
  return rows_to_jsonl(nested_cv(data, method_from_string(method), grid, truth).rows);
}

std::vector<int> from_serialized(std::vector<int> labels) {
  for (int& label : labels) label = label <= 0 ? -1 : label - 1;
  return labels;
}

}  // namespace

PYBIND11_MODULE(_vcpcr, m) {
  m.doc() = "Supervised variable clustering (VC-PCR) and baselines";

  static py::exception<Error> base(m, "VcpcrError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Usage)
        PyErr_SetString(PyExc_ValueError, e.what());
      else
        base(e.what());
    }
  });

  m.def("simulate", &simulate, py::arg("config") = 3, py::arg("n") = 50, py::arg("rho") = 0.6, py::arg("seed") = 1,
        py::arg("replicate") = 0, py::arg("allow_noncanonical") = false,
        "Simulated design: returns (X, y, truth JSON).");
  m.def("fit_vcpcr", &fit_vcpcr_json, py::arg("X"), py::arg("y"), py::arg("task") = "regression",
        py::arg("weights") = "ridge", py::arg("delta") = 1.0, py::arg("K") = 5, py::arg("lambda_") = py::none(),
        py::arg("lambda_ratio") = 0.3, py::arg("seed") = 1, py::arg("partition") = py::none(),
        "Weighted SOS-NMF followed by latent regression; returns fit JSON.");
  m.def("fit_crl", &fit_crl_json, py::arg("X"), py::arg("y"), py::arg("clusterer") = "kmeans", py::arg("K") = 5,
        py::arg("delta_ratio") = 0.1, py::arg("seed") = 1);
  m.def("fit_cen", &fit_cen_json, py::arg("X"), py::arg("y"), py::arg("K") = 5, py::arg("delta_ratio") = 0.1,
        py::arg("lambda_") = 1.0, py::arg("seed") = 1);
  m.def("nested_cv", &nested_cv_json, py::arg("X"), py::arg("y"), py::arg("task"), py::arg("method"),
        py::arg("grid_json") = "{}", py::arg("truth_json") = py::none(), "Returns benchmark rows as JSONL.");

  m.def(
      "lambda_max",
      [](const Matrix& X, const Vector& w, const std::vector<int>& labels) {
        const Partition part = canonicalize(labels);
        return vcpcr::lambda_max(X, WeightVector{w}, part);
      },
      py::arg("X"), py::arg("weights"), py::arg("labels"));
  m.def(
      "mcc", [](std::int64_t tp, std::int64_t tn, std::int64_t fp, std::int64_t fn) { return mcc({tp, tn, fp, fn}); },
      py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));
  m.def("support_mcc", &support_mcc, py::arg("b_hat"), py::arg("b_true"));
  m.def(
      "cluster_pair_mcc",
      [](const std::vector<int>& est, const std::vector<int>& truth, const std::string& convention) {
        return cluster_pair_mcc(from_serialized(est), from_serialized(truth), pair_convention_from_string(convention));
      },
      py::arg("labels_hat"), py::arg("labels_true"), py::arg("convention") = "linked",
      "Labels are 1-based with 0 for unassigned, as in fit and truth documents.");
  m.def("msep", &msep, py::arg("y_true"), py::arg("y_pred"));
}
