#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "spadmm/types.hpp"

namespace spadmm {

enum class PenaltyKind { Fixed, ResidualBalancing, SpectralBB, RegularizedBB };

/// Short CLI names: fixed, rb, bb, rbb.
std::string_view to_string(PenaltyKind kind);
std::optional<PenaltyKind> parse_penalty_kind(std::string_view name);

struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::RegularizedBB;
  double rho0 = 1.0;
  double eta = 2.0;          // residual-balancing growth factor, > 1
  double mu_rb = 10.0;       // residual-balancing imbalance threshold, > 1
  double eps_corr = 0.2;     // correlation safeguard, in (0, 1)
  double q = 1.0;            // exponent of the residual ratio
  std::size_t nbar = 2;      // update every nbar iterations
  double rho_min = 1e-8;
  double rho_max = 1e8;
  double tau_max = 1e12;     // tau when the dual residual vanishes
  std::size_t freeze_after = 1000;
  /// Use the ybar difference on the alpha side of the regularized rule (as in
  /// the BB1/BB2/correlation formulas). false uses the y difference instead.
  bool rbb_alpha_uses_ybar = true;

  /// Throws InputError naming the first violated invariant.
  void validate() const;
};

/// True when iteration k (0-based) may change rho: k mod nbar == 1 mod nbar
/// and k <= freeze_after.
bool is_penalty_update_iteration(std::size_t k, const PenaltyConfig& cfg);

double clip_rho(double rho, const PenaltyConfig& cfg);

/// Residual balancing: grow rho when the dual residual dominates, shrink it
/// when the primal residual dominates.
double rb_update(double rho, double r_norm, double d_norm, const PenaltyConfig& cfg);

/// ybar = y_prev + rho_prev * (z_prev - x_new).
Vec compute_ybar(const Vec& y_prev, double rho_prev, const Vec& x_new, const Vec& z_prev);

struct BBScalars {
  double bb1 = 0.0;   // <dy, dg> / |dy|^2
  double bb2 = 0.0;   // |dg|^2 / <dy, dg>, NaN when <dy, dg> == 0
  double corr = 0.0;  // <dy, dg> / (|dy| |dg|)
};

/// Spectral curvature estimates from a dual difference and the matching
/// gradient difference. Throws std::invalid_argument on a zero-norm input.
BBScalars bb_scalars(const Vec& d_dual, const Vec& d_grad);

/// (r_norm / d_norm)^q, or tau_max when d_norm == 0. Capped at tau_max.
double tau_update(double r_norm, double d_norm, double q, double tau_max = 1e12);

/// Regularized curvature estimate
///     (<dy, dg> + tau |dg|^2) / (|dy|^2 + tau <dy, dg>),
/// which runs from bb1 at tau = 0 to bb2 as tau -> inf.
/// Requires <dy, dg> > 0; throws std::domain_error otherwise.
double rbb_scalar(const Vec& d_dual, const Vec& d_grad, double tau);

/// Alternating long/short rule in step-size space. With sd = 1/bb1 and
/// mg = 1/bb2, picks mg when 2 mg > sd and sd - mg/2 otherwise, and returns
/// the matching curvature (reciprocal of the chosen step).
double hybrid_curvature(double bb1, double bb2);

enum class SafeguardBranch { Both, AlphaOnly, BetaOnly, Neither };

struct SafeguardOutcome {
  double rho = 0.0;
  SafeguardBranch branch = SafeguardBranch::Neither;
};

/// Correlation-safeguarded combination of the two curvature estimates:
/// 1/sqrt(alpha beta), 1/alpha, 1/beta or rho_current, then clipped.
SafeguardOutcome safeguarded_rho(double alpha, double alpha_corr, double beta, double beta_corr,
                                 double rho_current, const PenaltyConfig& cfg);

/// Iterates recorded at the previous spectral update.
struct SpectralMemory {
  bool populated = false;
  Vec ybar_prev;
  Vec y_prev;
  Vec x_prev;
  Vec z_prev;
  double tau = 0.0;
  double last_rho = 0.0;
};

/// Quantities available at a spectral update iteration.
struct SpectralSnapshot {
  Vec ybar;  // y^k + rho^k (z^k - x^{k+1})
  Vec y;     // y^{k+1}
  Vec x;     // x^{k+1}
  Vec z;     // z^{k+1}
  double rho = 0.0;  // rho^k
  double r_norm = 0.0;
  double d_norm = 0.0;
};

struct SpectralUpdate {
  double rho = 0.0;
  SpectralMemory memory;
  SafeguardBranch branch = SafeguardBranch::Neither;
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_corr = 0.0;
  double beta_corr = 0.0;
};

/// One spectral penalty step for kind SpectralBB or RegularizedBB.
///
/// With empty memory rho is kept and the memory is seeded from the snapshot.
/// Otherwise the differences against memory give alpha (dual-ybar vs x side)
/// and beta (dual-y vs -z side) and the safeguard picks the new rho.
SpectralUpdate spectral_rho(const SpectralMemory& memory, const SpectralSnapshot& current,
                            const PenaltyConfig& cfg);

/// Stateful per-solve penalty driver used by the engine.
class PenaltyController {
 public:
  explicit PenaltyController(PenaltyConfig cfg);

  double rho() const noexcept { return rho_; }
  const PenaltyConfig& config() const noexcept { return cfg_; }
  const SpectralMemory& memory() const noexcept { return memory_; }

  /// True when update(k, ...) would apply a rule (adaptive kind, scheduled
  /// iteration counted from the last restart, not frozen).
  bool due(std::size_t k) const;

  /// Applies the configured rule at iteration k and returns the new rho.
  /// Off-schedule iterations and the Fixed kind leave rho unchanged.
  double update(std::size_t k, const SpectralSnapshot& snapshot);

  /// The objective changed at iteration k (lambda was adjusted): forget the
  /// spectral memory and count schedule and freeze window from k + 1.
  void restart(std::size_t k);

 private:
  PenaltyConfig cfg_;
  double rho_;
  SpectralMemory memory_;
  std::size_t origin_ = 0;
};

}  // namespace spadmm
