#include "vcpcr/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vcpcr/errors.hpp"
#include "vcpcr/io.hpp"

namespace vcpcr {

std::string to_string(Task task) {
  return task == Task::Regression ? "regression" : "classification";
}

Task task_from_string(const std::string& name) {
  if (name == "regression") return Task::Regression;
  if (name == "classification") return Task::Classification;
  throw InvalidArgument("unknown task '" + name + "'");
}

void Dataset::validate() const {
  if (X.rows() < 2) throw InvalidArgument("dataset needs at least 2 rows");
  if (X.cols() < 1) throw InvalidArgument("dataset needs at least 1 predictor");
  if (y.size() != X.rows()) throw DimensionMismatch("response length differs from row count");
  if (!column_names.empty() && static_cast<Index>(column_names.size()) != X.cols())
    throw DimensionMismatch("column_names length differs from column count");
  if (!X.allFinite() || !y.allFinite()) throw NonFinite("dataset contains non-finite values");
  if (task == Task::Classification) {
    for (Index i = 0; i < y.size(); ++i)
      if (y(i) != 0.0 && y(i) != 1.0)
        throw InvalidArgument("classification response must be 0/1");
  }
}

double sample_mean(const Vector& x) { return x.mean(); }

double sample_sd(const Vector& x) {
  const Index n = x.size();
  if (n < 2) return 0.0;
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(n - 1));
}

namespace {

bool is_constant(double sd, double magnitude) {
  return !(sd > 1e-12 * std::max(1.0, magnitude));
}

}  // namespace

StandardizedMatrix standardize(const Matrix& X) {
  if (X.rows() < 2) throw InvalidArgument("standardize needs at least 2 rows");
  if (!X.allFinite()) throw NonFinite("standardize: non-finite input");
  StandardizedMatrix out;
  out.values.resize(X.rows(), X.cols());
  out.center.resize(X.cols());
  out.scale.resize(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const Vector col = X.col(j);
    const double mean = col.mean();
    const double sd = sample_sd(col);
    if (is_constant(sd, col.cwiseAbs().maxCoeff())) throw ConstantColumn(static_cast<std::size_t>(j));
    out.center(j) = mean;
    out.scale(j) = sd;
    out.values.col(j) = (col.array() - mean) / sd;
  }
  return out;
}

Matrix apply_standardization(const Matrix& X_new, const Vector& center, const Vector& scale) {
  if (center.size() != X_new.cols() || scale.size() != X_new.cols())
    throw DimensionMismatch("standardization parameters do not match column count");
  if ((scale.array() <= 0.0).any()) throw InvalidArgument("scale entries must be positive");
  Matrix out(X_new.rows(), X_new.cols());
  for (Index j = 0; j < X_new.cols(); ++j)
    out.col(j) = (X_new.col(j).array() - center(j)) / scale(j);
  return out;
}

StandardizedResponse standardize_response(const Vector& y, Task task) {
  if (!y.allFinite()) throw NonFinite("response contains non-finite values");
  StandardizedResponse out;
  out.task = task;
  if (task == Task::Classification) {
    out.values = y;
    return out;
  }
  if (y.size() < 2) throw InvalidArgument("response needs at least 2 values");
  const double mean = y.mean();
  const double sd = sample_sd(y);
  if (is_constant(sd, y.cwiseAbs().maxCoeff())) throw ConstantVector();
  out.center = mean;
  out.scale = sd;
  out.values = (y.array() - mean) / sd;
  return out;
}

Vector apply_response_standardization(const Vector& y, const StandardizedResponse& params) {
  return (y.array() - params.center) / params.scale;
}

double sample_correlation(const Vector& u, const Vector& x) {
  if (u.size() != x.size()) throw DimensionMismatch("correlation inputs differ in length");
  if (u.size() < 2) throw InvalidArgument("correlation needs at least 2 observations");
  const Vector du = u.array() - u.mean();
  const Vector dx = x.array() - x.mean();
  const double su = du.norm();
  const double sx = dx.norm();
  if (is_constant(su, u.cwiseAbs().maxCoeff()) || is_constant(sx, x.cwiseAbs().maxCoeff()))
    throw ConstantVector();
  return std::clamp(du.dot(dx) / (su * sx), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

// Splits one record. Quoted fields may contain commas and doubled quotes but
// not embedded newlines.
std::vector<std::string> split_record(const std::string& line, std::size_t row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(row, fields.size() + 1, "unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string cell = trim(raw);
  if (cell.empty()) throw ParseError(row, col, "missing value");
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(row, col, "not a number: '" + cell + "'");
  if (!std::isfinite(value)) throw ParseError(row, col, "non-finite value");
  return value;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column, Task task) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile(path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // UTF-8 byte order mark
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::vector<std::string> header = split_record(line, 1);
  for (auto& h : header) h = trim(h);

  const auto response_it = std::find(header.begin(), header.end(), response_column);
  if (response_it == header.end()) throw MissingColumn(response_column);
  const std::size_t response_index = static_cast<std::size_t>(response_it - header.begin());

  std::vector<std::vector<double>> rows;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, row_number);
    if (fields.size() != header.size())
      throw ParseError(row_number, std::min(fields.size(), header.size()) + 1,
                       "expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()));
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) values[c] = parse_cell(fields[c], row_number, c + 1);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw EmptyFile(path);

  Dataset data;
  data.task = task;
  data.response_name = response_column;
  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(header.size() - 1);
  data.X.resize(n, p);
  data.y.resize(n);
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != response_index) data.column_names.push_back(header[c]);
  for (Index i = 0; i < n; ++i) {
    Index j = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == response_index) {
        data.y(i) = rows[static_cast<std::size_t>(i)][c];
      } else {
        data.X(i, j++) = rows[static_cast<std::size_t>(i)][c];
      }
    }
  }
  if (task == Task::Classification) {
    for (Index i = 0; i < n; ++i)
      if (data.y(i) != 0.0 && data.y(i) != 1.0)
        throw ParseError(static_cast<std::size_t>(i) + 2, response_index + 1,
                         "classification response must be 0 or 1");
  }
  return data;
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ostringstream out;
  for (Index j = 0; j < data.p(); ++j) {
    const std::string name = data.column_names.empty() ? "x" + std::to_string(j + 1)
                                                       : data.column_names[static_cast<std::size_t>(j)];
    out << quote_if_needed(name) << ',';
  }
  out << quote_if_needed(data.response_name) << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) out << format_double(data.X(i, j)) << ',';
    out << format_double(data.y(i)) << '\n';
  }
  write_file_atomic(path, out.str());
}

Dataset take_rows(const Dataset& data, std::span<const Index> rows) {
  Dataset out;
  out.task = data.task;
  out.column_names = data.column_names;
  out.response_name = data.response_name;
  out.X.resize(static_cast<Index>(rows.size()), data.p());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    if (i < 0 || i >= data.n()) throw InvalidArgument("row index out of range");
    out.X.row(static_cast<Index>(r)) = data.X.row(i);
    out.y(static_cast<Index>(r)) = data.y(i);
  }
  return out;
}

}  // namespace vcpcr
