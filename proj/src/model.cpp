#include "spadmm/model.hpp"

#include <cmath>
#include <string>

#include "spadmm/errors.hpp"

namespace spadmm {
namespace {

void check_dims(const PortfolioProblem& problem, const Vec& x) {
  if (static_cast<std::size_t>(x.size()) != problem.n()) {
    throw InputError("dimension mismatch: problem has " + std::to_string(problem.n()) +
                     " assets, vector has " + std::to_string(x.size()));
  }
}

}  // namespace

PortfolioProblem build_problem(const AssetStats& stats, double target_return,
                               bool allow_out_of_range) {
  return build_problem(stats.cov, stats.mu, target_return, allow_out_of_range);
}

PortfolioProblem build_problem(Mat cov, Vec mu, double target_return, bool allow_out_of_range) {
  const Eigen::Index n = mu.size();
  if (n < 2) throw InputError("a portfolio needs at least 2 assets");
  if (cov.rows() != n || cov.cols() != n) {
    throw InputError("covariance must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!cov.allFinite() || !mu.allFinite() || !std::isfinite(target_return)) {
    throw InputError("problem data must be finite");
  }
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
    throw InputError("covariance must be symmetric");
  }

  const double lo = mu.minCoeff();
  const double hi = mu.maxCoeff();
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (hi - lo <= 1e-12 * std::max(scale, 1e-300) || hi - lo == 0.0) {
    throw InputError(
        "constraint matrix is rank-deficient: all expected returns are equal, so the return "
        "constraint is parallel to the budget constraint");
  }
  if (!allow_out_of_range && (target_return < lo || target_return > hi)) {
    throw InputError("target return " + format_plain_decimal(target_return) +
                     " outside [min(mu), max(mu)] = [" + format_plain_decimal(lo) + ", " +
                     format_plain_decimal(hi) + "]");
  }

  const Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw InputError("covariance must be positive definite");

  PortfolioProblem p;
  p.cov = std::move(cov);
  p.mu = std::move(mu);
  p.target_return = target_return;
  p.D.resize(2, n);
  p.D.row(0) = p.mu.transpose();
  p.D.row(1).setOnes();
  p.b = Vec2(target_return, 1.0);
  return p;
}

double evaluate_objective(const PortfolioProblem& problem, const Vec& x, double lambda) {
  check_dims(problem, x);
  return 0.5 * x.dot(problem.cov * x) + lambda * x.lpNorm<1>();
}

ConstraintViolation constraint_violation(const PortfolioProblem& problem, const Vec& x) {
  check_dims(problem, x);
  return {std::abs(x.dot(problem.mu) - problem.target_return), std::abs(x.sum() - 1.0)};
}

std::size_t count_short_positions(const Vec& x, double zero_tol) {
  return static_cast<std::size_t>((x.array() < -zero_tol).count());
}

std::size_t count_nonzeros(const Vec& x, double zero_tol) {
  return static_cast<std::size_t>((x.array().abs() > zero_tol).count());
}

Vec least_norm_feasible_point(const PortfolioProblem& problem) {
  const Eigen::Matrix2d gram = problem.D * problem.D.transpose();
  return problem.D.transpose() * gram.ldlt().solve(problem.b);
}

}  // namespace spadmm
