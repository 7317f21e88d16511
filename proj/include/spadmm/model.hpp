#pragma once

#include <cstddef>

#include "spadmm/market_data.hpp"
#include "spadmm/types.hpp"

namespace spadmm {

inline constexpr double kDefaultZeroTol = 1e-9;

/// min 1/2 x'Cx + lambda*|x|_1  s.t.  Dx = b, with D = [mu'; 1'] and b = (e, 1).
struct PortfolioProblem {
  Mat cov;
  Vec mu;
  double target_return = 0.0;
  ConstraintMat D;
  Vec2 b;

  std::size_t n() const { return static_cast<std::size_t>(mu.size()); }
};

/// Builds the constrained problem from estimated statistics.
///
/// Throws InputError when the target lies outside [min(mu), max(mu)] without
/// `allow_out_of_range`, and when all means coincide (the return row of D is
/// then parallel to the budget row).
PortfolioProblem build_problem(const AssetStats& stats, double target_return,
                               bool allow_out_of_range = false);
PortfolioProblem build_problem(Mat cov, Vec mu, double target_return,
                               bool allow_out_of_range = false);

struct Portfolio {
  Vec weights;
  double zero_tol = kDefaultZeroTol;
};

/// 1/2 x'Cx + lambda*|x|_1.
double evaluate_objective(const PortfolioProblem& problem, const Vec& x, double lambda);

struct ConstraintViolation {
  double return_gap = 0.0;  // |x'mu - e|
  double budget_gap = 0.0;  // |x'1 - 1|
};

ConstraintViolation constraint_violation(const PortfolioProblem& problem, const Vec& x);

/// Entries strictly below -zero_tol.
std::size_t count_short_positions(const Vec& x, double zero_tol = kDefaultZeroTol);
inline std::size_t count_short_positions(const Portfolio& p) {
  return count_short_positions(p.weights, p.zero_tol);
}

/// Entries with |x_i| > zero_tol.
std::size_t count_nonzeros(const Vec& x, double zero_tol = kDefaultZeroTol);

/// Minimum-norm solution of Dx = b, i.e. D'(DD')^{-1} b.
Vec least_norm_feasible_point(const PortfolioProblem& problem);

}  // namespace spadmm
