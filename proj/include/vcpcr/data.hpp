#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vcpcr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class Task { Regression, Classification };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

// Raw predictors and response as read from disk or generated.
struct Dataset {
  Matrix X;
  Vector y;
  Task task = Task::Regression;
  std::vector<std::string> column_names;  // empty or one label per column of X
  std::string response_name = "y";

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }

  // Throws InvalidArgument / NonFinite when the invariants do not hold.
  void validate() const;
};

// Column-standardized predictors: mean 0, sample variance 1 (n - 1 denominator).
struct StandardizedMatrix {
  Matrix values;
  Vector center;
  Vector scale;
};

struct StandardizedResponse {
  Vector values;
  double center = 0.0;
  double scale = 1.0;
  Task task = Task::Regression;
};

/// Centers and scales every column. Throws ConstantColumn for a zero-variance
/// column and NonFinite for NaN/inf input.
StandardizedMatrix standardize(const Matrix& X);

/// Applies previously estimated center/scale to new rows.
Matrix apply_standardization(const Matrix& X_new, const Vector& center, const Vector& scale);

/// Regression responses are centered and scaled; binary responses pass
/// through with center 0 and scale 1.
StandardizedResponse standardize_response(const Vector& y, Task task);

Vector apply_response_standardization(const Vector& y, const StandardizedResponse& params);

/// Pearson correlation. Throws ConstantVector if either input has zero variance.
double sample_correlation(const Vector& u, const Vector& x);

double sample_mean(const Vector& x);
double sample_sd(const Vector& x);

/// Reads a CSV with a header row. Every column except `response_column`
/// becomes a predictor.
Dataset load_csv(const std::string& path, const std::string& response_column,
                 Task task = Task::Regression);

/// Writes predictors followed by the response column.
void write_csv(const std::string& path, const Dataset& data);

/// Subset of rows, in the given order.
Dataset take_rows(const Dataset& data, std::span<const Index> rows);

}  // namespace vcpcr
