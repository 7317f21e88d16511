#include <doctest.h>

#include "spadmm/errors.hpp"
#include "spadmm/lambda_controller.hpp"

using namespace spadmm;

TEST_CASE("initial lambda") {
  CHECK(initial_lambda(100, 10) == doctest::Approx(0.001));
  CHECK(initial_lambda(2, 2) == doctest::Approx(0.25));
  CHECK_THROWS_AS(initial_lambda(1, 5), InputError);
  CHECK_THROWS_AS(initial_lambda(5, 1), InputError);
  for (std::size_t m : {2, 7, 60, 250}) {
    for (std::size_t n : {2, 3, 10, 33}) {
      CHECK(initial_lambda(2 * m, n) == doctest::Approx(0.5 * initial_lambda(m, n)));
      CHECK(initial_lambda(m, 2 * n) == doctest::Approx(0.5 * initial_lambda(m, n)));
    }
  }
}

TEST_CASE("proportional adjustment") {
  const LambdaSchedule s = maybe_adjust(LambdaSchedule::adaptive(0.001, 2), 5);
  CHECK(s.lambda_current == doctest::Approx(0.0025));
  CHECK(s.adjustments_made == 1);
  CHECK(s.lambda0 == 0.001);
}

TEST_CASE("no adjustment at the tolerated count") {
  const LambdaSchedule s = maybe_adjust(LambdaSchedule::adaptive(0.001, 2), 2);
  CHECK(s.lambda_current == 0.001);
  CHECK(s.adjustments_made == 0);
}

TEST_CASE("zero tolerance clamps the denominator") {
  CHECK(maybe_adjust(LambdaSchedule::adaptive(0.001, 0), 3).lambda_current ==
        doctest::Approx(0.003));
  // one short against sn=0 would give a unit ratio; lambda still grows
  CHECK(maybe_adjust(LambdaSchedule::adaptive(0.001, 0), 1).lambda_current ==
        doctest::Approx(0.002));
}

TEST_CASE("adjustments stop at the cap") {
  LambdaSchedule s = LambdaSchedule::adaptive(1e-6, 1, 3);
  double prev = s.lambda_current;
  for (int i = 0; i < 10; ++i) {
    s = maybe_adjust(s, 4);
    CHECK(s.lambda_current >= prev);
    prev = s.lambda_current;
  }
  CHECK(s.adjustments_made == 3);
  CHECK(s.lambda_current == doctest::Approx(64e-6));
}

TEST_CASE("fixed and auto modes never move") {
  LambdaSchedule f = LambdaSchedule::fixed(0.01);
  CHECK(maybe_adjust(f, 9).lambda_current == 0.01);
  LambdaSchedule a = LambdaSchedule::auto_initial(200, 10);
  CHECK(a.lambda_current == doctest::Approx(5e-4));
  CHECK(maybe_adjust(a, 9).lambda_current == a.lambda_current);
  CHECK(to_string(a.mode) == "auto-initial");
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(LambdaSchedule::fixed(-1.0), InputError);
  CHECK_NOTHROW(LambdaSchedule::fixed(0.0));
  CHECK_THROWS_AS(LambdaSchedule::adaptive(0.0, 1), InputError);
}
