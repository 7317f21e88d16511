#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spadmm/admm_engine.hpp"
#include "spadmm/model.hpp"

namespace spadmm {

enum class Suite { Random, IllConditioned, Shorts };

std::string_view to_string(Suite suite);
std::optional<Suite> parse_suite(std::string_view name);

/// Benchmark instance: a problem plus the lambda schedule it is solved with.
struct SuiteInstance {
  Suite suite = Suite::Random;
  std::size_t trial = 0;
  PortfolioProblem problem;
  LambdaSchedule lambda;
};

/// Deterministic instance generator.
///
///   random  - factor-model returns (120 periods), target at mid mean range,
///             lambda = 1/(mn).
///   illcond - covariance Q diag(s) Q' with s log-spaced over six decades
///             (condition number 1e6), lambda = 1/(250 n).
///   shorts  - one positive-beta market factor with little noise, so the
///             minimum-variance hedge shorts; adaptive lambda from
///             1e-3/(mn), sn = 1.
SuiteInstance make_suite_instance(Suite suite, std::size_t trial, std::uint64_t seed,
                                  std::size_t assets = 10);

struct BenchRow {
  Suite suite = Suite::Random;
  PenaltyKind strategy = PenaltyKind::Fixed;
  std::size_t trial = 0;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIter;
  double r_norm = 0.0;
  double d_norm = 0.0;
  double wall_ms = 0.0;
};

inline constexpr PenaltyKind kAllStrategies[] = {PenaltyKind::Fixed, PenaltyKind::ResidualBalancing,
                                                 PenaltyKind::SpectralBB, PenaltyKind::RegularizedBB};

/// Solves every (trial, strategy) pair. Trials run in parallel; rows come
/// back ordered by trial, then strategy in kAllStrategies order.
std::vector<BenchRow> run_bench(Suite suite, std::size_t trials, std::uint64_t seed,
                                const SolverConfig& base, std::size_t assets = 10);

/// Median iteration count for one strategy (lower median for even counts).
std::size_t median_iterations(const std::vector<BenchRow>& rows, PenaltyKind strategy);

}  // namespace spadmm
