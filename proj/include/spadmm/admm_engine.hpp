#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "spadmm/lambda_controller.hpp"
#include "spadmm/model.hpp"
#include "spadmm/penalty.hpp"
#include "spadmm/types.hpp"

namespace spadmm {

/// Which iterate the short-sale guard counts negatives on.
enum class ShortCountSource { X, Z };

/// When the short-sale guard may adjust lambda.
///   AtConvergence  - only on iterates that pass the stopping test, i.e. at
///                    approximate minimizers for the current lambda.
///   EveryIteration - after every y-update.
enum class LambdaGuardTiming { AtConvergence, EveryIteration };

struct SolverConfig {
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  PenaltyConfig penalty;
  LambdaSchedule lambda = LambdaSchedule::fixed(0.0);
  bool record_history = false;
  ShortCountSource short_source = ShortCountSource::Z;
  LambdaGuardTiming lambda_guard = LambdaGuardTiming::AtConvergence;
  double zero_tol = kDefaultZeroTol;

  void validate() const;
};

struct IterateState {
  Vec x;
  Vec z;
  Vec y;
  double rho = 1.0;
  double lambda = 0.0;
  std::size_t k = 0;
};

enum class Termination { Converged, MaxIter, NumericalFailure };

std::string_view to_string(Termination t);

/// Per-iteration traces. All arrays have one entry per completed iteration.
struct SolveHistory {
  std::vector<double> r_norm;
  std::vector<double> d_norm;
  std::vector<double> rho;
  std::vector<double> lambda;
  std::vector<double> objective;  // evaluated at z

  std::size_t size() const { return r_norm.size(); }
};

struct SolveResult {
  Portfolio weights;
  double objective = 0.0;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIter;
  SolveHistory history;
  std::size_t short_count = 0;

  double lambda_initial = 0.0;
  double lambda_final = 0.0;
  std::size_t lambda_adjustments = 0;
  double rho_final = 0.0;

  /// Final iterate; `state.rho` is the penalty used in the last iteration.
  IterateState state;
  /// z before the last iteration, so the dual residual can be recomputed.
  Vec z_prev;
  double r_norm = 0.0;
  double d_norm = 0.0;
  Vec2 multiplier = Vec2::Zero();
};

/// Componentwise sign(u) * max(|u| - kappa, 0).
Vec soft_threshold(const Vec& u, double kappa);

/// argmin_z lambda |z|_1 + rho/2 |z - (x_new - y/rho)|^2.
Vec z_update(const Vec& x_new, const Vec& y, double rho, double lambda);

/// y + rho (z_new - x_new).
Vec y_update(const Vec& y, double rho, const Vec& x_new, const Vec& z_new);

struct ResidualNorms {
  double r_norm = 0.0;  // |z - x|
  double d_norm = 0.0;  // rho |z - z_prev|
};

ResidualNorms residual_norms(const Vec& z_prev, const IterateState& state);

/// r_norm <= tol * max(|x|, |z|) and d_norm <= tol * max(|y|, 1).
bool stopping_check(double r_norm, double d_norm, const Vec& x, const Vec& z, const Vec& y,
                    double tol);

/// Runs the adaptive ADMM loop from the minimum-norm feasible point with y = 0.
///
/// Each iteration performs the x-update (exact KKT solve), z-update
/// (soft threshold), y-update, the short-sale guard on lambda and, on
/// scheduled iterations, the penalty update. An iteration that adjusted
/// lambda never terminates the loop. The factorization is rebuilt
/// only when rho changes. Never throws for non-convergence; reports it in
/// `termination`.
SolveResult solve(const PortfolioProblem& problem, const SolverConfig& cfg);

}  // namespace spadmm
