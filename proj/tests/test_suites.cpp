#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "spadmm/model.hpp"
#include "spadmm/suites.hpp"

using namespace spadmm;

TEST_CASE("suite names round trip") {
  for (Suite s : {Suite::Random, Suite::IllConditioned, Suite::Shorts}) {
    CHECK(parse_suite(to_string(s)) == s);
  }
  CHECK(to_string(Suite::IllConditioned) == "illcond");
  CHECK_FALSE(parse_suite("other").has_value());
}

TEST_CASE("instances are deterministic and differ by trial") {
  for (Suite s : {Suite::Random, Suite::IllConditioned, Suite::Shorts}) {
    const SuiteInstance a = make_suite_instance(s, 2, 9);
    const SuiteInstance b = make_suite_instance(s, 2, 9);
    const SuiteInstance c = make_suite_instance(s, 3, 9);
    CHECK(a.problem.cov == b.problem.cov);
    CHECK(a.problem.mu == b.problem.mu);
    CHECK(a.problem.cov != c.problem.cov);
    CHECK(a.problem.n() == 10);
  }
}

TEST_CASE("ill-conditioned covariance has condition number 1e6") {
  for (std::size_t t = 0; t < 3; ++t) {
    const SuiteInstance inst = make_suite_instance(Suite::IllConditioned, t, 4);
    Eigen::SelfAdjointEigenSolver<Mat> es(inst.problem.cov);
    const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    CHECK(cond == doctest::Approx(1e6).epsilon(1e-6));
  }
}

TEST_CASE("short-sale suite targets are reachable long-only") {
  for (std::size_t t = 0; t < 10; ++t) {
    const SuiteInstance inst = make_suite_instance(Suite::Shorts, t, 5);
    CHECK(inst.problem.target_return >= inst.problem.mu.minCoeff());
    CHECK(inst.problem.target_return <= inst.problem.mu.maxCoeff());
    CHECK(inst.lambda.mode == LambdaMode::Adaptive);
  }
}

TEST_CASE("bench rows are ordered by strategy then trial") {
  SolverConfig base;
  base.max_iter = 300;
  const std::vector<BenchRow> rows = run_bench(Suite::Random, 3, 1, base, 5);
  REQUIRE(rows.size() == 12);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].strategy == kAllStrategies[i / 3]);
    CHECK(rows[i].trial == i % 3);
    CHECK(rows[i].iterations >= 1);
  }
  const std::vector<BenchRow> again = run_bench(Suite::Random, 3, 1, base, 5);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].iterations == again[i].iterations);
}

TEST_CASE("lower median") {
  std::vector<BenchRow> rows(4);
  const std::size_t its[] = {7, 3, 9, 5};
  for (std::size_t i = 0; i < 4; ++i) {
    rows[i].strategy = PenaltyKind::SpectralBB;
    rows[i].iterations = its[i];
  }
  CHECK(median_iterations(rows, PenaltyKind::SpectralBB) == 5);
  CHECK(median_iterations(rows, PenaltyKind::Fixed) == 0);
}
