#include "spadmm/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spadmm/errors.hpp"

namespace spadmm {

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Fixed: return "fixed";
    case PenaltyKind::ResidualBalancing: return "rb";
    case PenaltyKind::SpectralBB: return "bb";
    case PenaltyKind::RegularizedBB: return "rbb";
  }
  return "unknown";
}

std::optional<PenaltyKind> parse_penalty_kind(std::string_view name) {
  if (name == "fixed") return PenaltyKind::Fixed;
  if (name == "rb") return PenaltyKind::ResidualBalancing;
  if (name == "bb") return PenaltyKind::SpectralBB;
  if (name == "rbb") return PenaltyKind::RegularizedBB;
  return std::nullopt;
}

void PenaltyConfig::validate() const {
  const auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!finite_pos(rho_min) || !finite_pos(rho_max) || !(rho_min < rho_max)) {
    throw InputError("penalty bounds must satisfy 0 < rho_min < rho_max");
  }
  if (!finite_pos(rho0) || rho0 < rho_min || rho0 > rho_max) {
    throw InputError("rho0 must lie in [rho_min, rho_max]");
  }
  if (!(eta > 1.0) || !std::isfinite(eta)) throw InputError("eta must be > 1");
  if (!(mu_rb > 1.0) || !std::isfinite(mu_rb)) throw InputError("mu_rb must be > 1");
  if (!(eps_corr > 0.0 && eps_corr < 1.0)) throw InputError("eps_corr must lie in (0, 1)");
  if (!finite_pos(q)) throw InputError("q must be positive");
  if (nbar < 1) throw InputError("nbar must be at least 1");
  if (!finite_pos(tau_max)) throw InputError("tau_max must be positive");
}

bool is_penalty_update_iteration(std::size_t k, const PenaltyConfig& cfg) {
  return k <= cfg.freeze_after && k % cfg.nbar == 1 % cfg.nbar;
}

double clip_rho(double rho, const PenaltyConfig& cfg) {
  return std::clamp(rho, cfg.rho_min, cfg.rho_max);
}

double rb_update(double rho, double r_norm, double d_norm, const PenaltyConfig& cfg) {
  double next = rho;
  if (r_norm > cfg.mu_rb * d_norm) {
    next = cfg.eta * rho;
  } else if (d_norm > cfg.mu_rb * r_norm) {
    next = rho / cfg.eta;
  }
  return clip_rho(next, cfg);
}

Vec compute_ybar(const Vec& y_prev, double rho_prev, const Vec& x_new, const Vec& z_prev) {
  return y_prev + rho_prev * (z_prev - x_new);
}

BBScalars bb_scalars(const Vec& d_dual, const Vec& d_grad) {
  const double dual_sq = d_dual.squaredNorm();
  const double grad_sq = d_grad.squaredNorm();
  if (!(dual_sq > 0.0) || !(grad_sq > 0.0)) {
    throw std::invalid_argument("spectral scalars need nonzero difference vectors");
  }
  const double inner = d_dual.dot(d_grad);
  BBScalars s;
  s.bb1 = inner / dual_sq;
  s.bb2 = inner != 0.0 ? grad_sq / inner : std::numeric_limits<double>::quiet_NaN();
  s.corr = inner / (std::sqrt(dual_sq) * std::sqrt(grad_sq));
  return s;
}

double tau_update(double r_norm, double d_norm, double q, double tau_max) {
  if (!(d_norm > 0.0)) return tau_max;
  return std::min(std::pow(r_norm / d_norm, q), tau_max);
}

double rbb_scalar(const Vec& d_dual, const Vec& d_grad, double tau) {
  const double inner = d_dual.dot(d_grad);
  if (!(inner > 0.0)) {
    throw std::domain_error("regularized spectral scalar needs positive curvature");
  }
  if (!(tau >= 0.0)) throw std::domain_error("tau must be nonnegative");
  return (inner + tau * d_grad.squaredNorm()) / (d_dual.squaredNorm() + tau * inner);
}

double hybrid_curvature(double bb1, double bb2) {
  const double steepest = 1.0 / bb1;
  const double minimal = 1.0 / bb2;
  const double step = 2.0 * minimal > steepest ? minimal : steepest - 0.5 * minimal;
  return 1.0 / step;
}

SafeguardOutcome safeguarded_rho(double alpha, double alpha_corr, double beta, double beta_corr,
                                 double rho_current, const PenaltyConfig& cfg) {
  const bool alpha_ok = alpha_corr > cfg.eps_corr && alpha > 0.0 && std::isfinite(alpha);
  const bool beta_ok = beta_corr > cfg.eps_corr && beta > 0.0 && std::isfinite(beta);
  SafeguardOutcome out;
  if (alpha_ok && beta_ok) {
    out = {1.0 / std::sqrt(alpha * beta), SafeguardBranch::Both};
  } else if (alpha_ok) {
    out = {1.0 / alpha, SafeguardBranch::AlphaOnly};
  } else if (beta_ok) {
    out = {1.0 / beta, SafeguardBranch::BetaOnly};
  } else {
    out = {rho_current, SafeguardBranch::Neither};
  }
  if (!std::isfinite(out.rho) || !(out.rho > 0.0)) {
    out = {rho_current, SafeguardBranch::Neither};
  }
  out.rho = clip_rho(out.rho, cfg);
  return out;
}

namespace {

struct SideEstimate {
  double curvature = 0.0;
  double corr = 0.0;
};

// Degenerate sides (zero differences, nonpositive curvature) report corr 0,
// which the safeguard always rejects since eps_corr > 0.
SideEstimate estimate_side(const Vec& d_dual, const Vec& d_grad, PenaltyKind kind, double tau) {
  if (!(d_dual.squaredNorm() > 0.0) || !(d_grad.squaredNorm() > 0.0)) return {};
  const BBScalars s = bb_scalars(d_dual, d_grad);
  if (!(s.corr > 0.0)) return {0.0, s.corr};
  const double curvature =
      kind == PenaltyKind::SpectralBB ? hybrid_curvature(s.bb1, s.bb2) : rbb_scalar(d_dual, d_grad, tau);
  return {curvature, s.corr};
}

}  // namespace

SpectralUpdate spectral_rho(const SpectralMemory& memory, const SpectralSnapshot& current,
                            const PenaltyConfig& cfg) {
  SpectralUpdate out;
  out.memory.populated = true;
  out.memory.ybar_prev = current.ybar;
  out.memory.y_prev = current.y;
  out.memory.x_prev = current.x;
  out.memory.z_prev = current.z;
  out.memory.tau = tau_update(current.r_norm, current.d_norm, cfg.q, cfg.tau_max);

  if (!memory.populated) {
    out.rho = clip_rho(current.rho, cfg);
    out.memory.last_rho = out.rho;
    return out;
  }

  const Vec d_ybar = current.ybar - memory.ybar_prev;
  const Vec d_y = current.y - memory.y_prev;
  const Vec d_psi = current.x - memory.x_prev;
  const Vec d_phi = -(current.z - memory.z_prev);

  const double tau = out.memory.tau;
  const Vec& alpha_dual =
      cfg.kind == PenaltyKind::RegularizedBB && !cfg.rbb_alpha_uses_ybar ? d_y : d_ybar;
  const SideEstimate alpha = estimate_side(alpha_dual, d_psi, cfg.kind, tau);
  const SideEstimate beta = estimate_side(d_y, d_phi, cfg.kind, tau);

  const SafeguardOutcome chosen =
      safeguarded_rho(alpha.curvature, alpha.corr, beta.curvature, beta.corr, current.rho, cfg);
  out.rho = chosen.rho;
  out.branch = chosen.branch;
  out.alpha = alpha.curvature;
  out.beta = beta.curvature;
  out.alpha_corr = alpha.corr;
  out.beta_corr = beta.corr;
  out.memory.last_rho = out.rho;
  return out;
}

PenaltyController::PenaltyController(PenaltyConfig cfg) : cfg_(std::move(cfg)), rho_(0.0) {
  cfg_.validate();
  rho_ = cfg_.rho0;
}

bool PenaltyController::due(std::size_t k) const {
  return cfg_.kind != PenaltyKind::Fixed && k >= origin_ &&
         is_penalty_update_iteration(k - origin_, cfg_);
}

double PenaltyController::update(std::size_t k, const SpectralSnapshot& snapshot) {
  if (!due(k)) return rho_;
  switch (cfg_.kind) {
    case PenaltyKind::ResidualBalancing:
      rho_ = rb_update(rho_, snapshot.r_norm, snapshot.d_norm, cfg_);
      break;
    case PenaltyKind::SpectralBB:
    case PenaltyKind::RegularizedBB: {
      SpectralUpdate u = spectral_rho(memory_, snapshot, cfg_);
      rho_ = u.rho;
      memory_ = std::move(u.memory);
      break;
    }
    case PenaltyKind::Fixed:
      break;
  }
  return rho_;
}

void PenaltyController::restart(std::size_t k) {
  // the next iteration counts as iteration 1 of a fresh schedule
  memory_ = SpectralMemory{};
  origin_ = k;
}

}  // namespace spadmm
