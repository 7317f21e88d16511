#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spadmm/errors.hpp"
#include "spadmm/model.hpp"
#include "spadmm/types.hpp"

namespace spadmm {

inline constexpr std::size_t kOracleMaxAssets = 12;

/// Sign pattern over assets: each entry in {-1, 0, +1}.
struct SignPattern {
  std::vector<std::int8_t> signs;

  std::size_t support_size() const;
};

/// Decodes pattern `index` in [0, 3^n): base-3 digit i maps 0 -> 0, 1 -> +1,
/// 2 -> -1 for asset i (asset 0 is the least significant digit).
SignPattern decode_pattern(std::uint64_t index, std::size_t n);

struct OracleResult {
  Vec weights;
  double objective = 0.0;
  Vec2 multiplier = Vec2::Zero();
  Vec subgradient;
  bool unique = true;
  std::uint64_t pattern_index = 0;
  std::size_t verified_patterns = 0;
};

/// No sign pattern satisfies the optimality conditions (typically an
/// unattainable target return).
class OracleInfeasibleError : public InputError {
 public:
  using InputError::InputError;
};

/// Exact minimizer of 1/2 x'Cx + lambda |x|_1 s.t. Dx = b by enumerating all
/// 3^n sign patterns, solving the KKT system on each support and keeping the
/// verified pattern of least objective. Patterns are evaluated in parallel
/// with OpenMP; the reduction orders candidates by pattern index so the
/// result does not depend on the thread count. Requires n <= 12.
OracleResult enumerate_solve(const PortfolioProblem& problem, double lambda);

/// Single-threaded reference for enumerate_solve; must give identical output.
OracleResult enumerate_solve_serial(const PortfolioProblem& problem, double lambda);

/// Max of the stationarity, feasibility and subgradient violations. With
/// lambda == 0 the subgradient terms are skipped since g drops out.
double check_kkt(const PortfolioProblem& problem, double lambda, const Vec& x, const Vec2& nu,
                 const Vec& g);

}  // namespace spadmm
