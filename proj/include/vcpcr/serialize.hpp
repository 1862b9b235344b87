#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "vcpcr/baselines.hpp"
#include "vcpcr/cv_harness.hpp"
#include "vcpcr/evaluation.hpp"
#include "vcpcr/simulation.hpp"
#include "vcpcr/vcpcr.hpp"

namespace vcpcr {

using Json = nlohmann::json;

// Serialized cluster labels are 1-based; 0 marks a variable outside the model.
Json labels_to_json(const std::vector<int>& labels);
std::vector<int> labels_from_json(const Json& j);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

// Fit schema shared by every method:
//   {method, task, scheme, weights, V, a, b, intercept, lambda, delta,
//    K_requested, K_surviving, labels, objective_trace, standardization}
// V is a list of {row, col, value} triplets with 1-based indices.
Json fit_to_json(const VcpcrFit& fit, const std::string& method);
Json fit_to_json(const CrlFit& fit, const std::string& method);
Json fit_to_json(const CenFit& fit, const std::string& method);

// Adds {x_center, x_scale, y_center, y_scale} under "standardization".
void attach_standardization(Json& fit, const Vector& x_center, const Vector& x_scale, double y_center,
                            double y_scale);

Json truth_to_json(const GroundTruth& truth, const SimSpec& spec);
TruthInfo truth_from_json(const Json& j);

Json sim_spec_to_json(const SimSpec& spec);
/// Missing keys keep the values of `defaults`; unknown keys throw InvalidArgument.
SimSpec sim_spec_from_json(const Json& j, SimSpec defaults = {});

Json grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(const Json& j, GridSpec defaults = {});

Json metric_report_to_json(const MetricReport& report);

Json row_to_json(const BenchmarkRow& row);
BenchmarkRow row_from_json(const Json& j);
Json fold_to_json(const FoldResult& fold);

/// One compact JSON object per line, in the given order.
std::string rows_to_jsonl(const std::vector<BenchmarkRow>& rows);
std::string folds_to_jsonl(const std::vector<FoldResult>& folds);

/// Summary table with model size and metrics per row; empty cells for
/// undefined metrics.
std::string rows_to_csv(const std::vector<BenchmarkRow>& rows);

/// Parses a JSON document, mapping syntax errors to ParseError.
Json parse_json(const std::string& text, const std::string& source);

}  // namespace vcpcr
