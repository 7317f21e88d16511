#include <doctest.h>

#include "spadmm/errors.hpp"
#include "spadmm/lambda_controller.hpp"
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
}  // namespace

TEST_CASE("pattern decoding") {
  const SignPattern p = decode_pattern(0, 3);
  CHECK(p.signs == std::vector<std::int8_t>{0, 0, 0});
  // digits are little-endian base 3: 1 -> +1, 2 -> -1
  const SignPattern q = decode_pattern(1 + 2 * 3 + 1 * 9, 3);
  CHECK(q.signs == std::vector<std::int8_t>{1, -1, 1});
  CHECK(q.support_size() == 3);
  CHECK(decode_pattern(26, 3).signs == std::vector<std::int8_t>{-1, -1, -1});
}

TEST_CASE("two assets are pinned for any lambda") {
  const PortfolioProblem p = build_problem(Mat::Identity(2, 2), vec({0.1, 0.2}), 0.15);
  for (double lambda : {0.0, 0.3, 10.0}) {
    const OracleResult r = enumerate_solve(p, lambda);
    CHECK(r.weights(0) == doctest::Approx(0.5));
    CHECK(r.weights(1) == doctest::Approx(0.5));
  }
}

TEST_CASE("symmetric three-asset case passes the KKT check") {
  const PortfolioProblem p = build_problem(Mat::Identity(3, 3), vec({0.1, 0.2, 0.3}), 0.2);
  const OracleResult r = enumerate_solve(p, 1.0);
  for (int i = 0; i < 3; ++i) CHECK(r.weights(i) == doctest::Approx(1.0 / 3.0));
  CHECK(check_kkt(p, 1.0, r.weights, r.multiplier, r.subgradient) <= 1e-9);
  CHECK(r.unique);
}

TEST_CASE("lambda zero matches a direct KKT solve") {
  const PortfolioProblem p = testing::market_problem(5, 60, 4);
  const Vec rhs = Vec::Zero(5);
  // rho = 0 gives the plain equality-constrained QP
  const testing::DenseKktSolution ref = testing::dense_kkt_solve(p.cov, p.D, 0.0, rhs, p.b);
  const OracleResult r = enumerate_solve(p, 0.0);
  CHECK((r.weights - ref.x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(check_kkt(p, 0.0, ref.x, ref.nu, Vec::Zero(5)) <= 1e-10);
}

TEST_CASE("oracle output satisfies its own optimality system") {
  for (std::size_t trial = 0; trial < 5; ++trial) {
    const PortfolioProblem p = testing::market_problem(7, 60, 100 + trial);
    for (double lambda : {0.0, initial_lambda(60, 7), 10 * initial_lambda(60, 7)}) {
      const OracleResult r = enumerate_solve(p, lambda);
      CHECK(check_kkt(p, lambda, r.weights, r.multiplier, r.subgradient) <= 1e-9);
      CHECK(r.subgradient.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
      CHECK(r.verified_patterns >= 1);
    }
  }
}

TEST_CASE("perturbing a weight breaks the KKT check") {
  for (std::size_t trial = 0; trial < 5; ++trial) {
    const SuiteInstance inst = make_suite_instance(Suite::Random, trial, 3, 8);
    const double lambda = inst.lambda.lambda_current;
    const OracleResult r = enumerate_solve(inst.problem, lambda);
    Vec x = r.weights;
    x(0) += 0.1;
    CHECK(check_kkt(inst.problem, lambda, x, r.multiplier, r.subgradient) >= 0.01);
  }
}

TEST_CASE("serial and parallel enumeration agree exactly") {
  for (std::size_t trial = 0; trial < 6; ++trial) {
    const PortfolioProblem p = testing::market_problem(4 + trial, 60, 500 + trial);
    const double lambda = (trial % 3) * initial_lambda(60, 4 + trial);
    const OracleResult a = enumerate_solve(p, lambda);
    const OracleResult b = enumerate_solve_serial(p, lambda);
    CHECK(a.weights == b.weights);
    CHECK(a.objective == b.objective);
    CHECK(a.pattern_index == b.pattern_index);
    CHECK(a.unique == b.unique);
    CHECK(a.verified_patterns == b.verified_patterns);
  }
}

TEST_CASE("too many assets are refused") {
  const PortfolioProblem p = testing::market_problem(kOracleMaxAssets + 1, 80, 1);
  CHECK_THROWS_AS(enumerate_solve(p, 0.0), InputError);
}
