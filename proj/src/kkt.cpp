#include "spadmm/kkt.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spadmm/errors.hpp"

namespace spadmm {

KktFactorization::KktFactorization(const PortfolioProblem& problem, double rho)
    : rho_(rho), D_(problem.D) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("penalty parameter must be positive and finite");
  }
  Mat shifted = problem.cov;
  shifted.diagonal().array() += rho;
  shifted_cov_.compute(shifted);
  if (shifted_cov_.info() != Eigen::Success) {
    throw SingularSystemError("C + rho I is not positive definite");
  }
  weighted_dt_ = shifted_cov_.solve(D_.transpose());
  const Eigen::Matrix2d schur = D_ * weighted_dt_;

  // The Schur complement is PD iff D has full row rank. Judge singularity
  // relative to its diagonal so the test is invariant to the scale of mu.
  const double det = schur(0, 0) * schur(1, 1) - schur(0, 1) * schur(1, 0);
  if (!(det > 1e-13 * schur(0, 0) * schur(1, 1))) {
    throw SingularSystemError(
        "KKT block matrix is singular: constraint rows are linearly dependent");
  }
  schur_.compute(schur);
  if (schur_.info() != Eigen::Success) {
    throw SingularSystemError("KKT Schur complement is not positive definite");
  }
}

KktFactorization::Solution KktFactorization::solve_rhs(const Vec& rhs, const Vec2& b) const {
  if (rhs.size() != weighted_dt_.rows()) {
    throw std::invalid_argument("right-hand side dimension mismatch");
  }
  Solution s;
  const Vec unconstrained = shifted_cov_.solve(rhs);
  s.nu = schur_.solve(D_ * unconstrained - b);
  s.x = unconstrained - weighted_dt_ * s.nu;

  // One refinement pass on the constraint block.
  const Vec2 correction = schur_.solve(D_ * s.x - b);
  s.x -= weighted_dt_ * correction;
  s.nu += correction;
  return s;
}

KktFactorization::Solution KktFactorization::solve(const Vec& z, const Vec& y, double rho,
                                                   const Vec2& b) const {
  if (rho != rho_) {
    throw std::invalid_argument("factorization was built for rho = " + std::to_string(rho_) +
                                ", asked to solve with rho = " + std::to_string(rho));
  }
  if (z.size() != y.size()) throw std::invalid_argument("z and y dimensions differ");
  return solve_rhs(rho * z + y, b);
}

}  // namespace spadmm
