#include "vcpcr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vcpcr/errors.hpp"

namespace vcpcr {

std::string to_string(Penalty penalty) {
  switch (penalty) {
    case Penalty::None: return "none";
    case Penalty::Lasso: return "lasso";
    case Penalty::Ridge: return "ridge";
  }
  return "none";
}

double soft_threshold(double z, double delta) {
  if (z > delta) return z - delta;
  if (z < -delta) return z + delta;
  return 0.0;
}

namespace {

void check_xy(const Matrix& X, const Vector& y) {
  if (X.rows() != y.size()) throw DimensionMismatch("design rows differ from response length");
  if (X.rows() == 0) throw InvalidArgument("empty design");
}

double relative_change(double previous, double current) {
  const double scale = std::max({std::abs(previous), std::abs(current), 1e-300});
  return std::abs(previous - current) / scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// OLS

LinearFit ols_fit(const Matrix& M, const Vector& y) {
  check_xy(M, y);
  LinearFit fit;
  fit.penalty = Penalty::None;
  const double n = static_cast<double>(M.rows());
  if (M.cols() == 0) {
    fit.coefficients = Vector::Zero(0);
    fit.loss = y.squaredNorm() / (2.0 * n);
    return fit;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  fit.rank_deficient = cod.rank() < M.cols();
  fit.coefficients = cod.solve(y);
  fit.loss = (y - M * fit.coefficients).squaredNorm() / (2.0 * n);
  fit.iterations = 1;
  return fit;
}

// ---------------------------------------------------------------------------
// Lasso

double lasso_objective(const Matrix& X, const Vector& y, const Vector& b, double delta) {
  const double n = static_cast<double>(X.rows());
  return (y - X * b).squaredNorm() / (2.0 * n) + delta * b.lpNorm<1>();
}

double lasso_delta_max(const Matrix& X, const Vector& y) {
  check_xy(X, y);
  // Same arithmetic as the first coordinate step from b = 0.
  const double n = static_cast<double>(X.rows());
  double best = 0.0;
  for (Index j = 0; j < X.cols(); ++j) best = std::max(best, std::abs(X.col(j).dot(y) / n));
  return best;
}

LinearFit lasso_fit(const Matrix& X, const Vector& y, double delta, const LassoOptions& options) {
  check_xy(X, y);
  if (!(delta >= 0.0)) throw InvalidArgument("lasso penalty must be nonnegative");
  const Index p = X.cols();
  const double n = static_cast<double>(X.rows());

  LinearFit fit;
  fit.penalty = Penalty::Lasso;
  fit.delta = delta;
  fit.coefficients = options.warm_start ? *options.warm_start : Vector::Zero(p);
  if (fit.coefficients.size() != p) throw DimensionMismatch("warm start has wrong length");

  const Vector col_sq = X.colwise().squaredNorm().transpose() / n;
  Vector residual = y - X * fit.coefficients;
  double objective = residual.squaredNorm() / (2.0 * n) + delta * fit.coefficients.lpNorm<1>();

  fit.converged = false;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) {
        fit.coefficients(j) = 0.0;
        continue;
      }
      const double old = fit.coefficients(j);
      const double z = X.col(j).dot(residual) / n + col_sq(j) * old;
      const double updated = soft_threshold(z, delta) / col_sq(j);
      if (updated != old) {
        residual.noalias() -= (updated - old) * X.col(j);
        fit.coefficients(j) = updated;
      }
    }
    const double next = residual.squaredNorm() / (2.0 * n) + delta * fit.coefficients.lpNorm<1>();
    fit.objective_trace.push_back(next);
    fit.iterations = sweep;
    const double change = relative_change(objective, next);
    objective = next;
    if (change < options.tol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) throw MaxIterations(options.max_sweeps);
  fit.loss = objective;
  return fit;
}

std::vector<LinearFit> lasso_path(const Matrix& X, const Vector& y, const std::vector<double>& deltas,
                                  const LassoOptions& options) {
  std::vector<LinearFit> fits;
  fits.reserve(deltas.size());
  LassoOptions opts = options;
  for (double delta : deltas) {
    fits.push_back(lasso_fit(X, y, delta, opts));
    opts.warm_start = fits.back().coefficients;
  }
  return fits;
}

// ---------------------------------------------------------------------------
// Ridge

LinearFit ridge_fit(const Matrix& X, const Vector& y, double delta) {
  check_xy(X, y);
  if (!(delta >= 0.0)) throw InvalidArgument("ridge penalty must be nonnegative");
  const Index n = X.rows();
  const Index p = X.cols();
  const double shift = 2.0 * static_cast<double>(n) * delta;

  LinearFit fit;
  fit.penalty = Penalty::Ridge;
  fit.delta = delta;
  fit.iterations = 1;
  if (delta == 0.0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(X);
    if (qr.rank() < p) throw SingularSystem("ridge with delta = 0 on a rank-deficient design");
    fit.coefficients = qr.solve(y);
  } else if (p <= n) {
    Matrix gram = X.transpose() * X;
    gram.diagonal().array() += shift;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw SingularSystem("ridge normal equations not positive definite");
    fit.coefficients = llt.solve(X.transpose() * y);
  } else {
    // (X'X + cI)^{-1} X'y = X'(XX' + cI)^{-1} y
    Matrix gram = X * X.transpose();
    gram.diagonal().array() += shift;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw SingularSystem("ridge normal equations not positive definite");
    fit.coefficients = X.transpose() * llt.solve(y);
  }
  fit.loss = (y - X * fit.coefficients).squaredNorm() / (2.0 * static_cast<double>(n)) +
             delta * fit.coefficients.squaredNorm();
  return fit;
}

// ---------------------------------------------------------------------------
// Logistic

namespace {

// log(1 + exp(eta)) without overflow
double log1pexp(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double nll_from_eta(const Vector& eta, const Vector& y) {
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) total += log1pexp(eta(i)) - y(i) * eta(i);
  return total;
}

void check_binary(const Vector& y) {
  bool has0 = false, has1 = false;
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) == 0.0) has0 = true;
    else if (y(i) == 1.0) has1 = true;
    else throw InvalidArgument("logistic response must be 0/1");
  }
  if (!has0 || !has1) throw InvalidArgument("logistic response needs both classes");
}

double initial_intercept(const Vector& y) {
  const double mean = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
  return std::log(mean / (1.0 - mean));
}

}  // namespace

double logistic_neg_log_likelihood(const Matrix& M, const Vector& y, double intercept, const Vector& b) {
  const Vector eta = (M * b).array() + intercept;
  return nll_from_eta(eta, y);
}

LogisticFit logistic_fit(const Matrix& M, const Vector& y, const LogisticOptions& options) {
  check_xy(M, y);
  check_binary(y);
  const Index n = M.rows();
  const Index q = M.cols() + 1;
  Matrix A(n, q);
  A.col(0).setOnes();
  A.rightCols(M.cols()) = M;

  Vector beta = Vector::Zero(q);
  beta(0) = initial_intercept(y);
  Vector eta = A * beta;
  double nll = nll_from_eta(eta, y);

  LogisticFit fit;
  fit.objective_trace.push_back(nll);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector pi = eta.unaryExpr([](double e) { return logistic(e); });
    const Vector grad = A.transpose() * (y - pi);
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tol) {
      fit.converged = true;
      break;
    }
    const Vector w = pi.array() * (1.0 - pi.array());
    const Matrix hessian = A.transpose() * w.asDiagonal() * A;
    const Vector direction = Eigen::CompleteOrthogonalDecomposition<Matrix>(hessian).solve(grad);

    double step = 1.0;
    Vector candidate = beta + direction;
    Vector candidate_eta = A * candidate;
    double candidate_nll = nll_from_eta(candidate_eta, y);
    int halvings = 0;
    while (!(candidate_nll <= nll) && halvings < options.max_halvings) {
      step *= 0.5;
      candidate = beta + step * direction;
      candidate_eta = A * candidate;
      candidate_nll = nll_from_eta(candidate_eta, y);
      ++halvings;
    }
    fit.iterations = it;
    if (!(candidate_nll <= nll)) break;  // no descent possible at machine precision
    const double change = relative_change(nll, candidate_nll);
    beta = candidate;
    eta = candidate_eta;
    nll = candidate_nll;
    fit.objective_trace.push_back(nll);
    if (beta.tail(q - 1).norm() > options.coefficient_cap || nll <= 1e-10 * static_cast<double>(n)) {
      fit.separated = true;
      break;
    }
    if (change < 1e-15) {
      fit.converged = true;
      break;
    }
  }
  fit.intercept = beta(0);
  fit.coefficients = beta.tail(q - 1);
  fit.neg_log_likelihood = nll;
  return fit;
}

double logistic_lasso_delta_max(const Matrix& X, const Vector& y) {
  check_xy(X, y);
  if (X.cols() == 0) return 0.0;
  const Vector centered = y.array() - y.mean();
  return (X.transpose() * centered).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

namespace {

LogisticFit ridge_logistic(const Matrix& X, const Vector& y, double delta, const LogisticOptions& options) {
  const Index n = X.rows();
  const Index q = X.cols() + 1;
  const double nd = static_cast<double>(n);
  Matrix A(n, q);
  A.col(0).setOnes();
  A.rightCols(X.cols()) = X;

  auto objective = [&](const Vector& beta, const Vector& eta) {
    return nll_from_eta(eta, y) / nd + delta * beta.tail(q - 1).squaredNorm();
  };

  Vector beta = Vector::Zero(q);
  beta(0) = initial_intercept(y);
  Vector eta = A * beta;
  double value = objective(beta, eta);
  LogisticFit fit;
  fit.objective_trace.push_back(value);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector pi = eta.unaryExpr([](double e) { return logistic(e); });
    Vector grad = A.transpose() * (pi - y) / nd;
    grad.tail(q - 1) += 2.0 * delta * beta.tail(q - 1);
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tol) {
      fit.converged = true;
      break;
    }
    const Vector w = pi.array() * (1.0 - pi.array());
    Matrix hessian = A.transpose() * w.asDiagonal() * A / nd;
    hessian.diagonal().tail(q - 1).array() += 2.0 * delta;
    Eigen::LDLT<Matrix> ldlt(hessian);
    Vector direction = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !direction.allFinite())
      direction = Eigen::CompleteOrthogonalDecomposition<Matrix>(hessian).solve(grad);

    double step = 1.0;
    Vector candidate = beta - direction;
    Vector candidate_eta = A * candidate;
    double candidate_value = objective(candidate, candidate_eta);
    int halvings = 0;
    while (!(candidate_value <= value) && halvings < options.max_halvings) {
      step *= 0.5;
      candidate = beta - step * direction;
      candidate_eta = A * candidate;
      candidate_value = objective(candidate, candidate_eta);
      ++halvings;
    }
    fit.iterations = it;
    if (!(candidate_value <= value)) break;
    const double change = relative_change(value, candidate_value);
    beta = candidate;
    eta = candidate_eta;
    value = candidate_value;
    fit.objective_trace.push_back(value);
    if (change < 1e-15) {
      fit.converged = true;
      break;
    }
  }
  fit.intercept = beta(0);
  fit.coefficients = beta.tail(q - 1);
  fit.neg_log_likelihood = nll_from_eta(eta, y);
  return fit;
}

// Proximal Newton: each outer step solves a weighted lasso on the quadratic
// approximation by coordinate descent, then backtracks along the segment.
LogisticFit lasso_logistic(const Matrix& X, const Vector& y, double delta, const LogisticOptions& options) {
  const Index n = X.rows();
  const Index p = X.cols();
  const double nd = static_cast<double>(n);

  auto objective = [&](double b0, const Vector& b, const Vector& eta) {
    (void)b0;
    return nll_from_eta(eta, y) / nd + delta * b.lpNorm<1>();
  };

  double b0 = initial_intercept(y);
  Vector b = Vector::Zero(p);
  Vector eta = Vector::Constant(n, b0);
  double value = objective(b0, b, eta);
  LogisticFit fit;
  fit.objective_trace.push_back(value);

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector pi = eta.unaryExpr([](double e) { return logistic(e); });
    const Vector w = (pi.array() * (1.0 - pi.array())).max(1e-5);
    const Vector z = eta.array() + (y - pi).array() / w.array();

    // weighted lasso: (1/(2n)) sum w_i (z_i - c - x_i'g)^2 + delta ||g||_1
    double c = b0;
    Vector g = b;
    Vector residual = z - X * g;
    residual.array() -= c;
    const Vector weighted_sq = (X.array().square().colwise() * w.array()).colwise().sum().transpose() / nd;
    const double w_sum = w.sum();
    for (int sweep = 0; sweep < 1000; ++sweep) {
      double max_change = 0.0;
      const double c_new = c + w.dot(residual) / w_sum;
      residual.array() -= c_new - c;
      max_change = std::max(max_change, std::abs(c_new - c));
      c = c_new;
      for (Index j = 0; j < p; ++j) {
        if (weighted_sq(j) == 0.0) continue;
        const double old = g(j);
        const double grad = (X.col(j).array() * w.array() * residual.array()).sum() / nd;
        const double updated = soft_threshold(grad + weighted_sq(j) * old, delta) / weighted_sq(j);
        if (updated != old) {
          residual.noalias() -= (updated - old) * X.col(j);
          g(j) = updated;
          max_change = std::max(max_change, std::abs(updated - old) * std::sqrt(weighted_sq(j)));
        }
      }
      if (max_change < 1e-10) break;
    }

    double step = 1.0;
    double cand_b0 = c;
    Vector cand_b = g;
    Vector cand_eta = (X * cand_b).array() + cand_b0;
    double cand_value = objective(cand_b0, cand_b, cand_eta);
    int halvings = 0;
    while (!(cand_value <= value) && halvings < options.max_halvings) {
      step *= 0.5;
      cand_b0 = b0 + step * (c - b0);
      cand_b = b + step * (g - b);
      cand_eta = (X * cand_b).array() + cand_b0;
      cand_value = objective(cand_b0, cand_b, cand_eta);
      ++halvings;
    }
    fit.iterations = it;
    if (!(cand_value <= value)) {
      fit.converged = true;
      break;
    }
    const double change = relative_change(value, cand_value);
    b0 = cand_b0;
    b = cand_b;
    eta = cand_eta;
    value = cand_value;
    fit.objective_trace.push_back(value);
    if (change < 1e-12) {
      fit.converged = true;
      break;
    }
  }
  fit.intercept = b0;
  fit.coefficients = b;
  fit.neg_log_likelihood = nll_from_eta(eta, y);
  return fit;
}

}  // namespace

LogisticFit penalized_logistic_fit(const Matrix& X, const Vector& y, Penalty penalty, double delta,
                                   const LogisticOptions& options) {
  check_xy(X, y);
  check_binary(y);
  if (!(delta >= 0.0)) throw InvalidArgument("penalty must be nonnegative");
  switch (penalty) {
    case Penalty::None: return logistic_fit(X, y, options);
    case Penalty::Ridge: return ridge_logistic(X, y, delta, options);
    case Penalty::Lasso: return lasso_logistic(X, y, delta, options);
  }
  return logistic_fit(X, y, options);
}

}  // namespace vcpcr
