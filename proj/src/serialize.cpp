#include "vcpcr/serialize.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "vcpcr/errors.hpp"
#include "vcpcr/io.hpp"

namespace vcpcr {

namespace {

Json optional_number(const std::optional<double>& value) {
  if (value && std::isfinite(*value)) return *value;
  return nullptr;
}

std::string csv_number(const std::optional<double>& value) {
  if (!value || !std::isfinite(*value)) return "";
  return format_double(*value);
}

void reject_unknown_keys(const Json& j, const std::set<std::string>& known, const std::string& what) {
  if (!j.is_object()) throw InvalidArgument(what + " must be a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw InvalidArgument("unknown " + what + " key '" + item.key() + "'");
}

template <typename T>
void read_key(const Json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad value for '") + key + "': " + e.what());
  }
}

Json membership_triplets(const Matrix& V) {
  Json triplets = Json::array();
  for (Index j = 0; j < V.rows(); ++j)
    for (Index c = 0; c < V.cols(); ++c)
      if (V(j, c) != 0.0) triplets.push_back({{"row", j + 1}, {"col", c + 1}, {"value", V(j, c)}});
  return triplets;
}

}  // namespace

Json labels_to_json(const std::vector<int>& labels) {
  Json out = Json::array();
  for (int label : labels) out.push_back(label < 0 ? 0 : label + 1);
  return out;
}

std::vector<int> labels_from_json(const Json& j) {
  std::vector<int> out;
  for (const auto& item : j) {
    const int label = item.get<int>();
    if (label < 0) throw InvalidArgument("serialized labels must be >= 0");
    out.push_back(label - 1);
  }
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a JSON array of numbers");
  Vector out(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Index>(i)) = j[i].get<double>();
  return out;
}

Json fit_to_json(const VcpcrFit& fit, const std::string& method) {
  Json j;
  j["method"] = method;
  j["task"] = to_string(fit.task);
  j["scheme"] = {{"kind", fit.scheme.name()}, {"delta", fit.scheme.delta}};
  j["weights"] = vector_to_json(fit.weights.values);
  j["V"] = membership_triplets(fit.sosnmf.V.values);
  std::vector<int> ids;
  for (int id : fit.sosnmf.V.cluster_ids) ids.push_back(id + 1);
  j["cluster_ids"] = ids;
  j["a"] = vector_to_json(fit.a);
  j["b"] = vector_to_json(fit.b);
  j["intercept"] = fit.intercept;
  j["lambda"] = fit.sosnmf.lambda;
  j["K_requested"] = fit.sosnmf.K_requested;
  j["K_surviving"] = fit.sosnmf.K_surviving();
  j["labels"] = labels_to_json(fit.labels());
  j["model_size"] = fit.model_size();
  j["objective_trace"] = fit.sosnmf.objective_trace;
  j["iterations"] = fit.sosnmf.iterations;
  j["converged"] = fit.sosnmf.converged;
  j["objective_increases"] = fit.sosnmf.objective_increases;
  j["rank_deficient"] = fit.rank_deficient;
  j["separated"] = fit.separated;
  attach_standardization(j, fit.x_center, fit.x_scale, fit.y_center, fit.y_scale);
  return j;
}

Json fit_to_json(const CrlFit& fit, const std::string& method) {
  Json j;
  j["method"] = method;
  j["task"] = "regression";
  j["delta"] = fit.delta;
  j["a"] = vector_to_json(fit.a);
  j["b"] = vector_to_json(fit.b);
  j["intercept"] = 0.0;
  j["K_requested"] = fit.partition.K;
  j["cluster_sizes"] = fit.partition.cluster_sizes();
  j["partition"] = labels_to_json(fit.partition.labels);
  j["labels"] = labels_to_json(fit.selected_labels());
  j["model_size"] = fit.model_size();
  return j;
}

Json fit_to_json(const CenFit& fit, const std::string& method) {
  Json j;
  j["method"] = method;
  j["task"] = "regression";
  j["delta"] = fit.delta;
  j["lambda"] = fit.lambda;
  j["b"] = vector_to_json(fit.b);
  j["intercept"] = 0.0;
  j["K_requested"] = fit.partition.K;
  j["partition"] = labels_to_json(fit.partition.labels);
  j["labels"] = labels_to_json(fit.selected_labels());
  j["model_size"] = fit.model_size();
  j["objective_trace"] = fit.objective_trace;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  return j;
}

void attach_standardization(Json& fit, const Vector& x_center, const Vector& x_scale, double y_center,
                            double y_scale) {
  fit["standardization"] = {{"x_center", vector_to_json(x_center)},
                            {"x_scale", vector_to_json(x_scale)},
                            {"y_center", y_center},
                            {"y_scale", y_scale}};
}

Json truth_to_json(const GroundTruth& truth, const SimSpec& spec) {
  Json j;
  j["b"] = vector_to_json(truth.b);
  j["labels"] = labels_to_json(truth.labels);
  j["sigma_eps2"] = truth.sigma_eps2;
  j["config"] = spec.config;
  j["rho"] = spec.rho;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["snr"] = spec.snr;
  j["seed"] = spec.seed;
  j["replicate"] = spec.replicate;
  return j;
}

TruthInfo truth_from_json(const Json& j) {
  if (!j.contains("b")) throw InvalidArgument("truth JSON lacks 'b'");
  TruthInfo truth;
  truth.b = vector_from_json(j.at("b"));
  if (j.contains("labels")) {
    truth.labels = labels_from_json(j.at("labels"));
    if (static_cast<Index>(truth.labels.size()) != truth.b.size())
      throw InvalidArgument("truth labels and coefficients differ in length");
  }
  return truth;
}

Json sim_spec_to_json(const SimSpec& spec) {
  Json j{{"config", spec.config},   {"n", spec.n},     {"p", spec.p},
         {"rho", spec.rho},         {"snr", spec.snr}, {"seed", spec.seed},
         {"replicate", spec.replicate}, {"allow_noncanonical", spec.allow_noncanonical}};
  j["sigma_eps"] = spec.sigma_eps_override ? Json(*spec.sigma_eps_override) : Json(nullptr);
  return j;
}

SimSpec sim_spec_from_json(const Json& j, SimSpec spec) {
  reject_unknown_keys(j, {"config", "n", "p", "rho", "snr", "seed", "replicate", "allow_noncanonical", "sigma_eps"},
                      "simulation");
  read_key(j, "config", spec.config);
  read_key(j, "n", spec.n);
  read_key(j, "p", spec.p);
  read_key(j, "rho", spec.rho);
  read_key(j, "snr", spec.snr);
  read_key(j, "seed", spec.seed);
  read_key(j, "replicate", spec.replicate);
  read_key(j, "allow_noncanonical", spec.allow_noncanonical);
  if (j.contains("sigma_eps") && !j.at("sigma_eps").is_null()) spec.sigma_eps_override = j.at("sigma_eps").get<double>();
  return spec;
}

Json grid_to_json(const GridSpec& grid) {
  return Json{{"grid_size", grid.grid_size},
              {"lambda_min_ratio", grid.lambda_min_ratio},
              {"delta_min_ratio", grid.delta_min_ratio},
              {"ridge_delta_min", grid.ridge_delta_min},
              {"ridge_delta_max", grid.ridge_delta_max},
              {"cen_lambda_min", grid.cen_lambda_min},
              {"cen_lambda_max", grid.cen_lambda_max},
              {"K_grid", grid.K_grid},
              {"n_inits", grid.n_inits},
              {"outer_folds", grid.outer_folds},
              {"inner_folds", grid.inner_folds},
              {"seed", grid.seed},
              {"pair_convention", to_string(grid.pair_convention)},
              {"sosnmf_max_iter", grid.sosnmf.max_iter},
              {"sosnmf_tol", grid.sosnmf.tol},
              {"cen_max_outer", grid.cen.max_outer},
              {"cen_restarts", grid.cen.n_restarts},
              {"jobs", grid.jobs}};
}

GridSpec grid_from_json(const Json& j, GridSpec grid) {
  reject_unknown_keys(j,
                      {"grid_size", "lambda_min_ratio", "delta_min_ratio", "ridge_delta_min", "ridge_delta_max",
                       "cen_lambda_min", "cen_lambda_max", "K_grid", "n_inits", "outer_folds", "inner_folds",
                       "seed", "pair_convention", "sosnmf_max_iter", "sosnmf_tol", "cen_max_outer",
                       "cen_restarts", "jobs"},
                      "grid");
  read_key(j, "grid_size", grid.grid_size);
  read_key(j, "lambda_min_ratio", grid.lambda_min_ratio);
  read_key(j, "delta_min_ratio", grid.delta_min_ratio);
  read_key(j, "ridge_delta_min", grid.ridge_delta_min);
  read_key(j, "ridge_delta_max", grid.ridge_delta_max);
  read_key(j, "cen_lambda_min", grid.cen_lambda_min);
  read_key(j, "cen_lambda_max", grid.cen_lambda_max);
  read_key(j, "K_grid", grid.K_grid);
  read_key(j, "n_inits", grid.n_inits);
  read_key(j, "outer_folds", grid.outer_folds);
  read_key(j, "inner_folds", grid.inner_folds);
  read_key(j, "seed", grid.seed);
  if (j.contains("pair_convention"))
    grid.pair_convention = pair_convention_from_string(j.at("pair_convention").get<std::string>());
  read_key(j, "sosnmf_max_iter", grid.sosnmf.max_iter);
  read_key(j, "sosnmf_tol", grid.sosnmf.tol);
  read_key(j, "cen_max_outer", grid.cen.max_outer);
  read_key(j, "cen_restarts", grid.cen.n_restarts);
  read_key(j, "jobs", grid.jobs);
  grid.validate();
  return grid;
}

Json metric_report_to_json(const MetricReport& report) {
  return Json{{"msep", optional_number(report.msep)},
              {"model_size", report.model_size},
              {"support_mcc", optional_number(report.support_mcc)},
              {"cluster_mcc", optional_number(report.cluster_mcc)},
              {"cluster_mcc_unlinked", optional_number(report.cluster_mcc_unlinked)}};
}

Json row_to_json(const BenchmarkRow& row) {
  return Json{{"setting", row.setting},
              {"method", row.method},
              {"fixed_hp_name", row.fixed_hp_name},
              {"fixed_hp_index", row.fixed_hp_index},
              {"fixed_hp_value", row.fixed_hp_value},
              {"model_size", row.model_size},
              {"msep", row.msep},
              {"prediction_mcc", optional_number(row.prediction_mcc)},
              {"support_mcc", optional_number(row.support_mcc)},
              {"cluster_mcc", optional_number(row.cluster_mcc)},
              {"cluster_mcc_unlinked", optional_number(row.cluster_mcc_unlinked)},
              {"n_folds", row.n_folds},
              {"n_inits", row.n_inits},
              {"null_model_folds", row.null_model_folds}};
}

BenchmarkRow row_from_json(const Json& j) {
  auto optional = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  BenchmarkRow row;
  row.setting = j.value("setting", "");
  row.method = j.at("method").get<std::string>();
  row.fixed_hp_name = j.at("fixed_hp_name").get<std::string>();
  row.fixed_hp_index = j.at("fixed_hp_index").get<int>();
  row.fixed_hp_value = j.at("fixed_hp_value").get<double>();
  row.model_size = j.at("model_size").get<double>();
  row.msep = j.at("msep").get<double>();
  row.prediction_mcc = optional("prediction_mcc");
  row.support_mcc = optional("support_mcc");
  row.cluster_mcc = optional("cluster_mcc");
  row.cluster_mcc_unlinked = optional("cluster_mcc_unlinked");
  row.n_folds = j.at("n_folds").get<int>();
  row.n_inits = j.at("n_inits").get<int>();
  row.null_model_folds = j.at("null_model_folds").get<int>();
  return row;
}

Json fold_to_json(const FoldResult& fold) {
  Json selected = nullptr;
  if (fold.selected_combo >= 0)
    selected = Json{{"K", fold.combo.K}, {"delta", fold.combo.delta}, {"lambda", fold.combo.lambda}};
  return Json{{"init", fold.init},
              {"outer_fold", fold.outer_fold},
              {"fixed_index", fold.fixed_index},
              {"fixed_value", fold.fixed_value},
              {"selected", selected},
              {"null_model", fold.null_model},
              {"msep", fold.msep},
              {"model_size", fold.model_size},
              {"prediction_mcc", optional_number(fold.prediction_mcc)},
              {"support_mcc", optional_number(fold.support_mcc)},
              {"cluster_mcc", optional_number(fold.cluster_mcc)},
              {"cluster_mcc_unlinked", optional_number(fold.cluster_mcc_unlinked)}};
}

std::string rows_to_jsonl(const std::vector<BenchmarkRow>& rows) {
  std::string out;
  for (const auto& row : rows) out += row_to_json(row).dump() + "\n";
  return out;
}

std::string folds_to_jsonl(const std::vector<FoldResult>& folds) {
  std::string out;
  for (const auto& fold : folds) out += fold_to_json(fold).dump() + "\n";
  return out;
}

std::string rows_to_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "setting,method,fixed_hp_name,fixed_hp_index,fixed_hp_value,model_size,msep,prediction_mcc,"
         "support_mcc,cluster_mcc,cluster_mcc_unlinked,n_folds,n_inits,null_model_folds\n";
  for (const auto& row : rows) {
    out << row.setting << ',' << row.method << ',' << row.fixed_hp_name << ',' << row.fixed_hp_index << ','
        << format_double(row.fixed_hp_value) << ',' << format_double(row.model_size) << ','
        << format_double(row.msep) << ',' << csv_number(row.prediction_mcc) << ','
        << csv_number(row.support_mcc) << ',' << csv_number(row.cluster_mcc) << ','
        << csv_number(row.cluster_mcc_unlinked) << ',' << row.n_folds << ',' << row.n_inits << ','
        << row.null_model_folds << '\n';
  }
  return out.str();
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(line, col, source + ": invalid JSON");
  }
}

}  // namespace vcpcr
