#include "spadmm/admm_engine.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "spadmm/errors.hpp"
#include "spadmm/kkt.hpp"

namespace spadmm {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIter: return "max_iter";
    case Termination::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InputError("tol must be positive");
  if (max_iter < 1) throw InputError("max_iter must be at least 1");
  if (!(zero_tol > 0.0)) throw InputError("zero_tol must be positive");
  penalty.validate();
  lambda.validate();
}

Vec soft_threshold(const Vec& u, double kappa) {
  Vec out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u(i)) - kappa;
    out(i) = mag > 0.0 ? std::copysign(mag, u(i)) : 0.0;
  }
  return out;
}

Vec z_update(const Vec& x_new, const Vec& y, double rho, double lambda) {
  return soft_threshold(x_new - y / rho, lambda / rho);
}

Vec y_update(const Vec& y, double rho, const Vec& x_new, const Vec& z_new) {
  return y + rho * (z_new - x_new);
}

ResidualNorms residual_norms(const Vec& z_prev, const IterateState& state) {
  return {(state.z - state.x).norm(), state.rho * (state.z - z_prev).norm()};
}

bool stopping_check(double r_norm, double d_norm, const Vec& x, const Vec& z, const Vec& y,
                    double tol) {
  const double primal_scale = std::max(x.norm(), z.norm());
  const double dual_scale = std::max(y.norm(), 1.0);
  return r_norm <= tol * primal_scale && d_norm <= tol * dual_scale;
}

SolveResult solve(const PortfolioProblem& problem, const SolverConfig& cfg) {
  cfg.validate();

  PenaltyController penalty(cfg.penalty);
  LambdaSchedule lambda = cfg.lambda;

  IterateState state;
  state.x = least_norm_feasible_point(problem);
  state.z = state.x;
  state.y = Vec::Zero(static_cast<Eigen::Index>(problem.n()));
  state.rho = penalty.rho();
  state.lambda = lambda.lambda_current;

  SolveResult result;
  result.lambda_initial = lambda.lambda_current;
  result.z_prev = state.z;

  std::optional<KktFactorization> kkt;
  kkt.emplace(problem, state.rho);

  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    const double rho = penalty.rho();
    if (kkt->rho() != rho) kkt.emplace(problem, rho);

    const Vec z_old = state.z;
    const Vec y_old = state.y;

    const KktFactorization::Solution xs = kkt->solve(z_old, y_old, rho, problem.b);
    const Vec z_new = z_update(xs.x, y_old, rho, lambda.lambda_current);
    const Vec y_new = y_update(y_old, rho, xs.x, z_new);

    state.x = xs.x;
    state.z = z_new;
    state.y = y_new;
    state.rho = rho;
    state.lambda = lambda.lambda_current;
    state.k = k + 1;
    result.multiplier = xs.nu;
    result.z_prev = z_old;

    const ResidualNorms res = residual_norms(z_old, state);
    result.r_norm = res.r_norm;
    result.d_norm = res.d_norm;
    result.iterations = k + 1;

    if (cfg.record_history) {
      result.history.r_norm.push_back(res.r_norm);
      result.history.d_norm.push_back(res.d_norm);
      result.history.rho.push_back(rho);
      result.history.lambda.push_back(lambda.lambda_current);
      result.history.objective.push_back(evaluate_objective(problem, state.z, lambda.lambda_current));
    }

    if (!state.x.allFinite() || !state.z.allFinite() || !state.y.allFinite() ||
        !std::isfinite(res.r_norm) || !std::isfinite(res.d_norm)) {
      result.termination = Termination::NumericalFailure;
      break;
    }

    const bool stop = stopping_check(res.r_norm, res.d_norm, state.x, state.z, state.y, cfg.tol);
    bool lambda_changed = false;
    if (stop || cfg.lambda_guard == LambdaGuardTiming::EveryIteration) {
      const Vec& guarded = cfg.short_source == ShortCountSource::X ? state.x : state.z;
      const std::size_t adjustments_before = lambda.adjustments_made;
      lambda = maybe_adjust(lambda, count_short_positions(guarded, cfg.zero_tol));
      lambda_changed = lambda.adjustments_made != adjustments_before;
    }
    if (stop && !lambda_changed) {
      result.termination = Termination::Converged;
      break;
    }
    if (lambda_changed) {
      penalty.restart(k);
      continue;
    }

    if (penalty.due(k)) {
      SpectralSnapshot snap;
      if (cfg.penalty.kind != PenaltyKind::ResidualBalancing) {
        snap.ybar = compute_ybar(y_old, rho, state.x, z_old);
        snap.y = state.y;
        snap.x = state.x;
        snap.z = state.z;
      }
      snap.rho = rho;
      snap.r_norm = res.r_norm;
      snap.d_norm = res.d_norm;
      penalty.update(k, snap);
    }
  }

  result.state = state;
  result.weights = Portfolio{state.x, cfg.zero_tol};
  result.lambda_final = lambda.lambda_current;
  result.lambda_adjustments = lambda.adjustments_made;
  result.rho_final = state.rho;
  result.short_count = count_short_positions(state.x, cfg.zero_tol);
  result.objective = result.termination == Termination::NumericalFailure
                         ? std::numeric_limits<double>::quiet_NaN()
                         : evaluate_objective(problem, state.x, lambda.lambda_current);
  return result;
}

}  // namespace spadmm
