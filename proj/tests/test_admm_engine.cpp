#include <doctest.h>

#include <cmath>
#include <random>

#include "spadmm/admm_engine.hpp"
#include "spadmm/errors.hpp"
#include "spadmm/oracle.hpp"
#include "spadmm/suites.hpp"
#include "test_support.hpp"

using namespace spadmm;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SolverConfig make_cfg(PenaltyKind kind, double lambda, double tol = 1e-8) {
  SolverConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = 200000;
  cfg.penalty.kind = kind;
  cfg.lambda = LambdaSchedule::fixed(lambda);
  return cfg;
}
}  // namespace

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(vec({2.0}), 0.5)(0) == 1.5);
  CHECK(soft_threshold(vec({-2.0}), 0.5)(0) == -1.5);
  CHECK(soft_threshold(vec({-0.3}), 0.5)(0) == 0.0);
  CHECK(soft_threshold(vec({0.5, -0.5}), 0.5) == Vec::Zero(2));
  const Vec u = vec({0.3, -1.2, 0.0, 4.0});
  CHECK(soft_threshold(u, 0.0) == u);
}

TEST_CASE("z update") {
  const Vec z = z_update(vec({1, -1}), Vec::Zero(2), 1.0, 0.5);
  CHECK(z(0) == 0.5);
  CHECK(z(1) == -0.5);
  const Vec x = vec({0.2, -0.7, 1.1});
  const Vec y = vec({0.3, 0.1, -0.4});
  CHECK((z_update(x, y, 2.0, 0.0) - (x - y / 2.0)).cwiseAbs().maxCoeff() < 1e-15);
}

// The z-step minimizes lambda |z|_1 + rho/2 |z - (x - y/rho)|^2.
TEST_CASE("z update beats random perturbations") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(1e-4, 1.0);
  const Vec x = testing::random_vec(5, rng);
  const Vec y = testing::random_vec(5, rng);
  const double rho = 0.8;
  const double lambda = 0.6;
  const Vec v = x - y / rho;
  const auto f = [&](const Vec& z) {
    return lambda * z.lpNorm<1>() + 0.5 * rho * (z - v).squaredNorm();
  };
  const Vec z = z_update(x, y, rho, lambda);
  const double best = f(z);
  int worse = 0;
  for (int t = 0; t < 10000; ++t) {
    Vec p = z;
    const double s = scale(rng);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) += s * normal(rng);
    if (f(p) < best - 1e-15) ++worse;
  }
  CHECK(worse == 0);
}

TEST_CASE("y update") {
  const Vec y = y_update(Vec::Zero(2), 2.0, vec({1, 0}), vec({0, 0}));
  CHECK(y(0) == -2.0);
  CHECK(y(1) == 0.0);
  const Vec y0 = vec({0.1, -0.2});
  const Vec x = vec({0.4, 0.6});
  Vec cur = y0;
  for (int i = 0; i < 5; ++i) cur = y_update(cur, 3.0, x, x);
  CHECK(cur == y0);
}

TEST_CASE("residual norms") {
  IterateState s;
  s.x = vec({1, 0});
  s.z = vec({0, 0});
  s.y = Vec::Zero(2);
  s.rho = 2.0;
  CHECK(residual_norms(s.z, s).r_norm == 1.0);
  CHECK(residual_norms(s.z, s).d_norm == 0.0);
  CHECK(residual_norms(vec({0, 1}), s).d_norm == 2.0);
}

TEST_CASE("stopping check") {
  const Vec x = vec({0.6, 0.8});
  const Vec z = vec({0.3, 0.4});
  const Vec y = vec({3.0, 4.0});
  CHECK(stopping_check(0.0, 0.0, x, z, y, 1e-6));
  CHECK_FALSE(stopping_check(2e-6 * x.norm(), 0.0, x, z, y, 1e-6));
  CHECK(stopping_check(1e-6, 4.9e-6, x, z, y, 1e-6));
  CHECK_FALSE(stopping_check(1e-6, 5.1e-6, x, z, y, 1e-6));
  CHECK(stopping_check(0.0, 1e-20, x, z, Vec::Zero(2), 1e-6));
  CHECK(stopping_check(0.0, 1e-6, x, z, Vec::Zero(2), 1e-6));
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.tol = 0.0;
  const PortfolioProblem p = build_problem(Mat::Identity(2, 2), vec({0.1, 0.2}), 0.15);
  CHECK_THROWS_AS(solve(p, cfg), InputError);
  cfg.tol = 1e-6;
  cfg.max_iter = 0;
  CHECK_THROWS_AS(solve(p, cfg), InputError);
}

TEST_CASE("fully constrained two-asset problem") {
  const PortfolioProblem p = build_problem(Mat::Identity(2, 2), vec({0.1, 0.2}), 0.15);
  for (PenaltyKind kind : kAllStrategies) {
    for (double lambda : {0.0, 0.1, 5.0}) {
      const SolveResult r = solve(p, make_cfg(kind, lambda));
      CHECK(r.termination == Termination::Converged);
      // y has to travel about lambda/rho before z leaves the dead zone
      CHECK(r.iterations <= 20);
      CHECK(r.weights.weights(0) == doctest::Approx(0.5));
      CHECK(r.weights.weights(1) == doctest::Approx(0.5));
    }
  }
}

TEST_CASE("symmetric three-asset problem for every lambda") {
  const PortfolioProblem p = build_problem(Mat::Identity(3, 3), vec({0.1, 0.2, 0.3}), 0.2);
  for (double lambda : {0.0, 0.01, 1.0}) {
    const OracleResult ref = enumerate_solve(p, lambda);
    for (int i = 0; i < 3; ++i) CHECK(ref.weights(i) == doctest::Approx(1.0 / 3.0));
    for (PenaltyKind kind : kAllStrategies) {
      const SolveResult r = solve(p, make_cfg(kind, lambda));
      CHECK(r.termination == Termination::Converged);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(r.weights.weights(i) - 1.0 / 3.0) < 1e-6);
    }
  }
}

TEST_CASE("random instance agrees with the oracle for all strategies") {
  const PortfolioProblem p = testing::market_problem(6, 60, 31);
  const double lambda = initial_lambda(60, 6);
  const OracleResult ref = enumerate_solve(p, lambda);
  for (PenaltyKind kind : kAllStrategies) {
    CAPTURE(to_string(kind));
    const SolveResult r = solve(p, make_cfg(kind, lambda));
    CHECK(r.termination == Termination::Converged);
    CHECK(std::abs(r.objective - ref.objective) <= 1e-6 * std::abs(ref.objective));
  }
}

TEST_CASE("lambda zero matches the equality-constrained closed form") {
  const PortfolioProblem p = testing::market_problem(5, 60, 8);
  Mat K = Mat::Zero(7, 7);
  K.topLeftCorner(5, 5) = p.cov;
  K.topRightCorner(5, 2) = p.D.transpose();
  K.bottomLeftCorner(2, 5) = p.D;
  Vec rhs = Vec::Zero(7);
  rhs.tail(2) = p.b;
  const Vec closed = K.fullPivLu().solve(rhs).head(5);
  SolverConfig cfg = make_cfg(PenaltyKind::RegularizedBB, 0.0, 1e-12);
  const SolveResult r = solve(p, cfg);
  CHECK(r.termination == Termination::Converged);
  CHECK((r.weights.weights - closed).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("textbook scaled iteration is reproduced exactly") {
  const PortfolioProblem p = testing::market_problem(5, 60, 44);
  const double rho = 2.0;
  const double lambda = 0.004;
  const auto ref = testing::textbook_scaled_admm(p, rho, lambda, 10);
  for (std::size_t k = 1; k <= 10; ++k) {
    SolverConfig cfg = make_cfg(PenaltyKind::Fixed, lambda, 1e-300);
    cfg.max_iter = k;
    cfg.penalty.rho0 = rho;
    const SolveResult r = solve(p, cfg);
    CHECK(r.iterations == k);
    CHECK((r.state.x - ref[k - 1].x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.state.z - ref[k - 1].z).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((-r.state.y / rho - ref[k - 1].u).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("history bookkeeping") {
  const PortfolioProblem p = testing::market_problem(7, 60, 2);
  for (PenaltyKind kind : kAllStrategies) {
    SolverConfig cfg = make_cfg(kind, initial_lambda(60, 7), 1e-6);
    cfg.max_iter = 3000;
    cfg.record_history = true;
    const SolveResult r = solve(p, cfg);
    REQUIRE(r.history.size() == r.iterations);
    CHECK(r.history.rho.size() == r.iterations);
    CHECK(r.history.objective.size() == r.iterations);
    for (std::size_t k = 0; k < r.iterations; ++k) {
      CHECK(std::isfinite(r.history.objective[k]));
      if (k > 0 && r.history.rho[k] != r.history.rho[k - 1]) {
        // rho only moves after a scheduled update iteration
        CHECK(is_penalty_update_iteration(k - 1, cfg.penalty));
      }
    }
    if (kind == PenaltyKind::Fixed) {
      for (double rho : r.history.rho) CHECK(rho == cfg.penalty.rho0);
    }
  }
}

TEST_CASE("converged terminations satisfy the stopping inequalities") {
  for (std::size_t trial = 0; trial < 3; ++trial) {
    const SuiteInstance inst = make_suite_instance(Suite::Random, trial, 1);
    for (PenaltyKind kind : kAllStrategies) {
      SolverConfig cfg;
      cfg.penalty.kind = kind;
      cfg.lambda = inst.lambda;
      const SolveResult r = solve(inst.problem, cfg);
      if (r.termination != Termination::Converged) continue;
      const double rr = (r.state.z - r.state.x).norm();
      const double dd = r.state.rho * (r.state.z - r.z_prev).norm();
      CHECK(rr <= cfg.tol * std::max(r.state.x.norm(), r.state.z.norm()));
      CHECK(dd <= cfg.tol * std::max(r.state.y.norm(), 1.0));
    }
  }
}

TEST_CASE("max iteration exhaustion is reported") {
  const PortfolioProblem p = testing::market_problem(6, 60, 5);
  SolverConfig cfg = make_cfg(PenaltyKind::Fixed, 0.001, 1e-12);
  cfg.max_iter = 3;
  const SolveResult r = solve(p, cfg);
  CHECK(r.termination == Termination::MaxIter);
  CHECK(r.iterations == 3);
  CHECK(to_string(r.termination) == "max_iter");
}

TEST_CASE("adaptive lambda removes shorts") {
  const SuiteInstance inst = make_suite_instance(Suite::Shorts, 0, 5);
  SolverConfig cfg;
  cfg.penalty.kind = PenaltyKind::RegularizedBB;
  cfg.max_iter = 20000;
  cfg.lambda = LambdaSchedule::adaptive(inst.lambda.lambda0, 0);
  const SolveResult r = solve(inst.problem, cfg);
  CHECK(r.termination == Termination::Converged);
  CHECK(r.weights.weights.minCoeff() >= -1e-6);
  CHECK(r.lambda_final >= r.lambda_initial);
  CHECK(r.lambda_adjustments <= cfg.lambda.max_adjustments);

  // the same instance with the starting lambda held fixed does hold shorts
  SolverConfig fixed = cfg;
  fixed.lambda = LambdaSchedule::fixed(inst.lambda.lambda0);
  const SolveResult f = solve(inst.problem, fixed);
  CHECK(count_short_positions(f.state.z) > 0);
}

TEST_CASE("solves are deterministic") {
  const PortfolioProblem p = testing::market_problem(8, 60, 6);
  SolverConfig cfg = make_cfg(PenaltyKind::SpectralBB, 0.002, 1e-8);
  const SolveResult a = solve(p, cfg);
  const SolveResult b = solve(p, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.weights.weights == b.weights.weights);
  CHECK(a.rho_final == b.rho_final);
}

TEST_CASE("asset order does not change the portfolio") {
  const PortfolioProblem p = testing::market_problem(6, 60, 13);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
  perm.indices() << 3, 0, 5, 1, 4, 2;
  const PortfolioProblem q =
      build_problem(Mat(perm * p.cov * perm.transpose()), Vec(perm * p.mu), p.target_return);
  const double lambda = initial_lambda(60, 6);
  const SolveResult a = solve(p, make_cfg(PenaltyKind::RegularizedBB, lambda, 1e-10));
  const SolveResult b = solve(q, make_cfg(PenaltyKind::RegularizedBB, lambda, 1e-10));
  CHECK((perm * a.weights.weights - b.weights.weights).cwiseAbs().maxCoeff() < 1e-6);
}
