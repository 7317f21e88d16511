#include "spadmm/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "spadmm/errors.hpp"
#include "spadmm/market_data.hpp"

namespace spadmm {
namespace {

std::uint64_t trial_seed(std::uint64_t seed, Suite suite, std::size_t trial) {
  // SplitMix64 finalizer over the combined key.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + (static_cast<std::uint64_t>(suite) << 32) +
                    static_cast<std::uint64_t>(trial) + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double mid_target(const Vec& mu) { return 0.5 * (mu.minCoeff() + mu.maxCoeff()); }

SuiteInstance random_instance(std::size_t trial, std::uint64_t seed, std::size_t n) {
  constexpr std::size_t kPeriods = 120;
  SyntheticMarketSpec spec;
  spec.assets = n;
  spec.periods = kPeriods;
  spec.seed = seed;
  spec.factor_count = 3;
  spec.noise_scale = 0.01;
  const AssetStats stats = estimate_stats(generate_synthetic_returns(spec));
  SuiteInstance inst;
  inst.suite = Suite::Random;
  inst.trial = trial;
  inst.problem = build_problem(stats, mid_target(stats.mu));
  inst.lambda = LambdaSchedule::auto_initial(kPeriods, n);
  return inst;
}

SuiteInstance illcond_instance(std::size_t trial, std::uint64_t seed, std::size_t n) {
  constexpr std::size_t kNominalPeriods = 250;
  constexpr double kTopVariance = 1e-4;
  constexpr double kDecades = 6.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> drift(0.0, 0.02);

  const auto nn = static_cast<Eigen::Index>(n);
  Mat g(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) g(i, j) = normal(rng);
  }
  const Eigen::HouseholderQR<Mat> qr(g);
  const Mat q = qr.householderQ();
  Vec spectrum(nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    spectrum(i) = kTopVariance * std::pow(10.0, -kDecades * static_cast<double>(i) /
                                                    static_cast<double>(nn - 1));
  }
  Mat cov = q * spectrum.asDiagonal() * q.transpose();
  cov = 0.5 * (cov + cov.transpose());
  Vec mu(nn);
  for (Eigen::Index i = 0; i < nn; ++i) mu(i) = drift(rng);

  SuiteInstance inst;
  inst.suite = Suite::IllConditioned;
  inst.trial = trial;
  const double target = mid_target(mu);
  inst.problem = build_problem(std::move(cov), std::move(mu), target);
  inst.lambda = LambdaSchedule::auto_initial(kNominalPeriods, n);
  return inst;
}

SuiteInstance shorts_instance(std::size_t trial, std::uint64_t seed, std::size_t n) {
  // One market factor with strictly positive betas: the variance-minimizing
  // hedge shorts high-beta assets.
  constexpr std::size_t kPeriods = 120;
  constexpr double kLambdaScale = 1e-3;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto nn = static_cast<Eigen::Index>(n);
  const auto m = static_cast<Eigen::Index>(kPeriods);
  Vec drift(nn);
  Vec beta(nn);
  for (Eigen::Index i = 0; i < nn; ++i) drift(i) = 0.02 * unit(rng);
  for (Eigen::Index i = 0; i < nn; ++i) beta(i) = 0.01 * (0.5 + 1.5 * unit(rng));
  Mat values(m, nn);
  for (Eigen::Index t = 0; t < m; ++t) {
    const double market = normal(rng);
    for (Eigen::Index i = 0; i < nn; ++i) values(t, i) = drift(i) + beta(i) * market + 0.002 * normal(rng);
  }
  const AssetStats stats = estimate_stats(make_returns(std::move(values)));
  const double lo = stats.mu.minCoeff();
  const double hi = stats.mu.maxCoeff();
  SuiteInstance inst;
  inst.suite = Suite::Shorts;
  inst.trial = trial;
  inst.problem = build_problem(stats, lo + 0.75 * (hi - lo));
  inst.lambda = LambdaSchedule::adaptive(kLambdaScale * initial_lambda(kPeriods, n), 1);
  return inst;
}

}  // namespace

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::Random: return "random";
    case Suite::IllConditioned: return "illcond";
    case Suite::Shorts: return "shorts";
  }
  return "unknown";
}

std::optional<Suite> parse_suite(std::string_view name) {
  if (name == "random") return Suite::Random;
  if (name == "illcond") return Suite::IllConditioned;
  if (name == "shorts") return Suite::Shorts;
  return std::nullopt;
}

SuiteInstance make_suite_instance(Suite suite, std::size_t trial, std::uint64_t seed,
                                  std::size_t assets) {
  if (assets < 2) throw InputError("suite instances need at least 2 assets");
  const std::uint64_t s = trial_seed(seed, suite, trial);
  switch (suite) {
    case Suite::Random: return random_instance(trial, s, assets);
    case Suite::IllConditioned: return illcond_instance(trial, s, assets);
    case Suite::Shorts: return shorts_instance(trial, s, assets);
  }
  throw InputError("unknown suite");
}

std::vector<BenchRow> run_bench(Suite suite, std::size_t trials, std::uint64_t seed,
                                const SolverConfig& base, std::size_t assets) {
  constexpr std::size_t kStrategies = std::size(kAllStrategies);
  std::vector<BenchRow> rows(trials * kStrategies);
  const auto total = static_cast<std::int64_t>(rows.size());

  // Instances are built up front so solver timing excludes generation.
  std::vector<SuiteInstance> instances;
  instances.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) instances.push_back(make_suite_instance(suite, t, seed, assets));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t job = 0; job < total; ++job) {
    // rows come out sorted by strategy, then trial
    const auto trial = static_cast<std::size_t>(job) % trials;
    const PenaltyKind kind = kAllStrategies[static_cast<std::size_t>(job) / trials];
    SolverConfig cfg = base;
    cfg.penalty.kind = kind;
    cfg.lambda = instances[trial].lambda;
    cfg.record_history = false;

    const auto start = std::chrono::steady_clock::now();
    const SolveResult result = solve(instances[trial].problem, cfg);
    const auto stop = std::chrono::steady_clock::now();

    BenchRow& row = rows[static_cast<std::size_t>(job)];
    row.suite = suite;
    row.strategy = kind;
    row.trial = trial;
    row.iterations = result.iterations;
    row.termination = result.termination;
    row.r_norm = result.r_norm;
    row.d_norm = result.d_norm;
    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  return rows;
}

std::size_t median_iterations(const std::vector<BenchRow>& rows, PenaltyKind strategy) {
  std::vector<std::size_t> its;
  for (const auto& r : rows) {
    if (r.strategy == strategy) its.push_back(r.iterations);
  }
  if (its.empty()) return 0;
  std::sort(its.begin(), its.end());
  return its[(its.size() - 1) / 2];
}

}  // namespace spadmm
