#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vcpcr {

// Broad failure class; the CLI maps it to an exit code.
enum class ErrorCategory { Usage, Numerical, IO };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCategory::Usage, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(ErrorCategory::Usage, what) {}
};

class NonFinite : public Error {
 public:
  explicit NonFinite(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class ConstantColumn : public Error {
 public:
  explicit ConstantColumn(std::size_t column)
      : Error(ErrorCategory::Numerical, "column " + std::to_string(column) + " is constant"),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class ConstantVector : public Error {
 public:
  ConstantVector() : Error(ErrorCategory::Numerical, "correlation undefined for a constant vector") {}
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class MaxIterations : public Error {
 public:
  explicit MaxIterations(int limit)
      : Error(ErrorCategory::Numerical,
              "no convergence within " + std::to_string(limit) + " iterations"),
        limit_(limit) {}
  int limit() const noexcept { return limit_; }

 private:
  int limit_;
};

class EmptyCluster : public Error {
 public:
  explicit EmptyCluster(int cluster)
      : Error(ErrorCategory::Usage, "initial cluster " + std::to_string(cluster) + " is empty"),
        cluster_(cluster) {}
  int cluster() const noexcept { return cluster_; }

 private:
  int cluster_;
};

class DegenerateLatent : public Error {
 public:
  explicit DegenerateLatent(int cluster)
      : Error(ErrorCategory::Numerical,
              "latent variable of cluster " + std::to_string(cluster) + " has zero variance"),
        cluster_(cluster) {}
  int cluster() const noexcept { return cluster_; }

 private:
  int cluster_;
};

class AllVariablesRemoved : public Error {
 public:
  AllVariablesRemoved()
      : Error(ErrorCategory::Numerical,
              "all variables removed from the clustering (lambda too large)") {}
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

class TooFewSamples : public Error {
 public:
  explicit TooFewSamples(const std::string& what) : Error(ErrorCategory::Usage, what) {}
};

class IOError : public Error {
 public:
  explicit IOError(const std::string& what) : Error(ErrorCategory::IO, what) {}
};

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& name)
      : Error(ErrorCategory::IO, "missing column '" + name + "'") {}
};

class EmptyFile : public Error {
 public:
  explicit EmptyFile(const std::string& path) : Error(ErrorCategory::IO, "empty file: " + path) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& detail)
      : Error(ErrorCategory::IO, "parse error at row " + std::to_string(row) + ", column " +
                                     std::to_string(col) + ": " + detail),
        row_(row),
        col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace vcpcr
