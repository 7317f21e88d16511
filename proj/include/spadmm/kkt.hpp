#pragma once

#include "spadmm/model.hpp"
#include "spadmm/types.hpp"

namespace spadmm {

/// Factorization of the x-update block system
///
///     [ C + rho I   D' ] [ x  ]   [ rho z + y ]
///     [ D           0  ] [ nu ] = [ b         ]
///
/// stored as a Cholesky factor of C + rho I bordered by the 2x2 Schur
/// complement D (C + rho I)^{-1} D'. Immutable once built; valid only for the
/// rho it was built with.
class KktFactorization {
 public:
  struct Solution {
    Vec x;
    Vec2 nu;
  };

  /// Throws SingularSystemError when the bordered system is singular, which
  /// with C + rho I positive definite means rank(D) < 2.
  KktFactorization(const PortfolioProblem& problem, double rho);

  double rho() const noexcept { return rho_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(weighted_dt_.rows()); }

  /// Solves for the given right-hand side. `rho` must equal rho(); a
  /// mismatch throws std::invalid_argument.
  Solution solve(const Vec& z, const Vec& y, double rho, const Vec2& b) const;

  /// General right-hand side (top block `rhs`, bottom block `b`).
  Solution solve_rhs(const Vec& rhs, const Vec2& b) const;

 private:
  double rho_;
  ConstraintMat D_;
  Eigen::LLT<Mat> shifted_cov_;       // C + rho I
  Eigen::Matrix<double, Eigen::Dynamic, 2> weighted_dt_;  // (C + rho I)^{-1} D'
  Eigen::LLT<Eigen::Matrix2d> schur_;  // D (C + rho I)^{-1} D'
};

/// Convenience wrapper matching the free-function form of the x-update.
inline Vec solve_x_update(const KktFactorization& f, const Vec& z, const Vec& y, double rho,
                          const Vec2& b) {
  return f.solve(z, y, rho, b).x;
}

}  // namespace spadmm
