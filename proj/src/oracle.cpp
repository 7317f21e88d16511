#include "spadmm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace spadmm {
namespace {

constexpr double kSignSlack = 1e-12;
constexpr double kSubgradientSlack = 1e-9;
constexpr double kTieTol = 1e-10;
constexpr double kSameWeightsTol = 1e-8;
constexpr double kSupportTol = 1e-12;

struct Candidate {
  std::uint64_t index = 0;
  Vec x;
  Vec2 nu;
  Vec g;
  double objective = 0.0;
};

std::uint64_t pattern_count(std::size_t n) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 3;
  return count;
}

void check_oracle_input(const PortfolioProblem& problem, double lambda) {
  if (problem.n() > kOracleMaxAssets) {
    throw InputError("enumeration oracle supports at most " + std::to_string(kOracleMaxAssets) +
                     " assets, got " + std::to_string(problem.n()));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("lambda must be finite and nonnegative");
  }
}

// Solves the KKT system restricted to the pattern's support and verifies it.
std::optional<Candidate> evaluate_pattern(const PortfolioProblem& problem, double lambda,
                                          std::uint64_t index) {
  const std::size_t n = problem.n();
  const SignPattern pattern = decode_pattern(index, n);
  std::vector<Eigen::Index> support;
  for (std::size_t i = 0; i < n; ++i) {
    if (pattern.signs[i] != 0) support.push_back(static_cast<Eigen::Index>(i));
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  if (k < 2) return std::nullopt;

  Mat c_ss(k, k);
  ConstraintMat d_s(2, k);
  Vec s_s(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) c_ss(a, b) = problem.cov(support[a], support[b]);
    d_s.col(a) = problem.D.col(support[a]);
    s_s(a) = pattern.signs[static_cast<std::size_t>(support[a])];
  }

  const Eigen::LLT<Mat> llt(c_ss);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::Matrix<double, Eigen::Dynamic, 2> w = llt.solve(d_s.transpose());
  const Eigen::Matrix2d schur = d_s * w;
  const double det = schur(0, 0) * schur(1, 1) - schur(0, 1) * schur(1, 0);
  if (!(det > 1e-13 * schur(0, 0) * schur(1, 1))) return std::nullopt;

  const Vec h = llt.solve(-lambda * s_s);
  const Vec2 nu = schur.ldlt().solve(d_s * h - problem.b);
  const Vec x_s = h - w * nu;

  for (Eigen::Index a = 0; a < k; ++a) {
    if (s_s(a) * x_s(a) < -kSignSlack) return std::nullopt;
  }

  Candidate c;
  c.index = index;
  c.nu = nu;
  c.x = Vec::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index a = 0; a < k; ++a) c.x(support[a]) = x_s(a);

  // Off-support stationarity: C_i x + D_i' nu + lambda g_i = 0 with |g_i| <= 1.
  const Vec grad = problem.cov * c.x + problem.D.transpose() * nu;
  const double grad_scale = 1.0 + (problem.cov * c.x).cwiseAbs().maxCoeff() +
                            (problem.D.transpose() * nu).cwiseAbs().maxCoeff();
  c.g = Vec::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (pattern.signs[i] != 0) {
      c.g(ii) = lambda > 0.0 ? pattern.signs[i] : 0.0;
      continue;
    }
    if (lambda > 0.0) {
      c.g(ii) = -grad(ii) / lambda;
      if (std::abs(c.g(ii)) > 1.0 + kSubgradientSlack) return std::nullopt;
    } else if (std::abs(grad(ii)) > 1e-10 * grad_scale) {
      return std::nullopt;
    }
  }
  c.objective = evaluate_objective(problem, c.x, lambda);
  return c;
}

OracleResult reduce(std::vector<Candidate> candidates) {
  if (candidates.empty()) {
    throw OracleInfeasibleError(
        "no sign pattern satisfies the optimality conditions; the target return is likely "
        "unattainable for this problem");
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].objective < candidates[best].objective) best = i;
  }
  const Candidate& winner = candidates[best];

  OracleResult out;
  out.weights = winner.x;
  out.objective = winner.objective;
  out.multiplier = winner.nu;
  out.subgradient = winner.g;
  out.pattern_index = winner.index;
  out.verified_patterns = candidates.size();

  const auto support_of = [](const Vec& x) { return (x.array().abs() > kSupportTol).eval(); };
  const auto winner_support = support_of(winner.x);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i == best) continue;
    const Candidate& c = candidates[i];
    if (std::abs(c.objective - winner.objective) > kTieTol) continue;
    const bool same_support = (support_of(c.x) == winner_support).all();
    const bool same_weights = (c.x - winner.x).cwiseAbs().maxCoeff() <= kSameWeightsTol;
    if (!same_support && !same_weights) out.unique = false;
  }
  return out;
}

}  // namespace

std::size_t SignPattern::support_size() const {
  return static_cast<std::size_t>(std::count_if(signs.begin(), signs.end(),
                                                [](std::int8_t s) { return s != 0; }));
}

SignPattern decode_pattern(std::uint64_t index, std::size_t n) {
  SignPattern p;
  p.signs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto digit = index % 3;
    p.signs[i] = digit == 0 ? 0 : (digit == 1 ? 1 : -1);
    index /= 3;
  }
  return p;
}

OracleResult enumerate_solve_serial(const PortfolioProblem& problem, double lambda) {
  check_oracle_input(problem, lambda);
  const std::uint64_t total = pattern_count(problem.n());
  std::vector<Candidate> candidates;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    if (auto c = evaluate_pattern(problem, lambda, idx)) candidates.push_back(std::move(*c));
  }
  return reduce(std::move(candidates));
}

OracleResult enumerate_solve(const PortfolioProblem& problem, double lambda) {
  check_oracle_input(problem, lambda);
  const auto total = static_cast<std::int64_t>(pattern_count(problem.n()));
  std::vector<Candidate> candidates;

#pragma omp parallel
  {
    std::vector<Candidate> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t idx = 0; idx < total; ++idx) {
      if (auto c = evaluate_pattern(problem, lambda, static_cast<std::uint64_t>(idx))) {
        local.push_back(std::move(*c));
      }
    }
#pragma omp critical(spadmm_oracle_merge)
    {
      for (auto& c : local) candidates.push_back(std::move(c));
    }
  }
  return reduce(std::move(candidates));
}

double check_kkt(const PortfolioProblem& problem, double lambda, const Vec& x, const Vec2& nu,
                 const Vec& g) {
  const Eigen::Index n = static_cast<Eigen::Index>(problem.n());
  if (x.size() != n || g.size() != n) throw InputError("check_kkt: dimension mismatch");
  const Vec stationarity = problem.cov * x + lambda * g + problem.D.transpose() * nu;
  double worst = stationarity.cwiseAbs().maxCoeff();
  worst = std::max(worst, (problem.D * x - problem.b).cwiseAbs().maxCoeff());
  if (lambda > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(x(i)) > kSupportTol) {
        worst = std::max(worst, std::abs(g(i) - (x(i) > 0.0 ? 1.0 : -1.0)));
      } else {
        worst = std::max(worst, std::max(std::abs(g(i)) - 1.0, 0.0));
      }
    }
  }
  return worst;
}

}  // namespace spadmm
