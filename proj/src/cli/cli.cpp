#include "spadmm/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "spadmm/errors.hpp"
#include "spadmm/lambda_controller.hpp"
#include "spadmm/model.hpp"
#include "spadmm/penalty.hpp"
#include "spadmm/suites.hpp"

namespace spadmm::cli {
namespace {

using nlohmann::json;

struct SolverFlags {
  std::string input;
  std::optional<double> target;
  std::string strategy = "rbb";
  std::string lambda = "auto";
  bool adaptive_lambda = false;
  std::size_t sn = 0;
  std::size_t max_adjustments = 50;
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  PenaltyConfig penalty;
  std::string count_shorts_on = "z";
  std::string lambda_guard = "converged";
  double jitter_floor = kDefaultJitterFloor;
  double zero_tol = kDefaultZeroTol;
  bool allow_out_of_range = false;
  bool history = false;
  bool seed_independent = false;
};

void add_penalty_flags(CLI::App* cmd, PenaltyConfig& p) {
  cmd->add_option("--rho0", p.rho0, "Initial penalty parameter")->capture_default_str();
  cmd->add_option("--q", p.q, "Exponent of the residual ratio in the rbb rule")->capture_default_str();
  cmd->add_option("--nbar", p.nbar, "Penalty update frequency (iterations)")->capture_default_str();
  cmd->add_option("--eta", p.eta, "Residual-balancing growth factor (> 1)")->capture_default_str();
  cmd->add_option("--mu-rb", p.mu_rb, "Residual-balancing imbalance threshold (> 1)")
      ->capture_default_str();
  cmd->add_option("--eps-corr", p.eps_corr, "Spectral correlation safeguard in (0, 1)")
      ->capture_default_str();
  cmd->add_option("--rho-min", p.rho_min, "Lower clip for rho")->capture_default_str();
  cmd->add_option("--rho-max", p.rho_max, "Upper clip for rho")->capture_default_str();
  cmd->add_option("--tau-max", p.tau_max, "Cap for the residual-ratio regularizer")
      ->capture_default_str();
  cmd->add_option("--freeze-after", p.freeze_after, "Hold rho fixed after this iteration")
      ->capture_default_str();
  cmd->add_option("--rbb-alpha-uses-ybar", p.rbb_alpha_uses_ybar,
                  "Use the ybar difference on the alpha side of the rbb rule (true|false)")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("-i,--input", f.input, "Returns CSV (header of asset names, one row per period)")
      ->required();
  cmd->add_option("-e,--target-return", f.target,
                  "Target per-period portfolio return (default: midpoint of the mean range)");
  cmd->add_option("--strategy", f.strategy, "Penalty strategy")
      ->check(CLI::IsMember({"fixed", "rb", "bb", "rbb"}))
      ->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Regularization: 'auto' (1/(m n)) or a nonnegative value")
      ->capture_default_str();
  cmd->add_flag("--adaptive-lambda", f.adaptive_lambda,
                "Raise lambda while short positions exceed --sn");
  cmd->add_option("--sn", f.sn, "Tolerated number of short positions")->capture_default_str();
  cmd->add_option("--max-adjustments", f.max_adjustments, "Cap on lambda adjustments")
      ->capture_default_str();
  cmd->add_option("--tol", f.tol, "Stopping tolerance")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration limit")->capture_default_str();
  add_penalty_flags(cmd, f.penalty);
  cmd->add_option("--count-shorts-on", f.count_shorts_on, "Iterate checked by the short-sale guard")
      ->check(CLI::IsMember({"x", "z"}))
      ->capture_default_str();
  cmd->add_option("--lambda-guard", f.lambda_guard,
                  "When the short-sale guard may adjust lambda: at converged iterates or every iteration")
      ->check(CLI::IsMember({"converged", "every"}))
      ->capture_default_str();
  cmd->add_option("--jitter-floor", f.jitter_floor, "Covariance eigenvalue floor")
      ->capture_default_str();
  cmd->add_option("--zero-tol", f.zero_tol, "Magnitude below which a weight counts as zero")
      ->capture_default_str();
  cmd->add_flag("--allow-out-of-range", f.allow_out_of_range,
                "Accept targets outside [min(mu), max(mu)]");
  cmd->add_flag("--seed-independent", f.seed_independent,
                "Recorded in config_echo; solving uses no randomness");
}

void add_output_flag(CLI::App* cmd, std::string& path) {
  cmd->add_option("-o,--output", path, "Output file (default: stdout)");
}

// Writes to `path`, or to `out` when path is empty.
bool emit(const std::string& path, const std::string& text, std::ostream& out, std::ostream& err) {
  if (path.empty()) {
    out << text;
    return true;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "error: cannot write output file '" << path << "'\n";
    return false;
  }
  file << text;
  file.flush();
  if (!file) {
    err << "error: failed writing output file '" << path << "'\n";
    return false;
  }
  return true;
}

struct PreparedSolve {
  ReturnsMatrix returns;
  AssetStats stats;
  SolverConfig config;
  json echo;
};

PreparedSolve prepare(const SolverFlags& f) {
  PreparedSolve p;
  try {
    p.returns = load_returns_csv(f.input);
  } catch (const ParseError& e) {
    throw InputError("--input " + f.input + ": " + e.what());
  }
  p.stats = estimate_stats(p.returns, f.jitter_floor);

  SolverConfig& cfg = p.config;
  cfg.tol = f.tol;
  cfg.max_iter = f.max_iter;
  cfg.penalty = f.penalty;
  cfg.penalty.kind = *parse_penalty_kind(f.strategy);
  cfg.record_history = f.history;
  cfg.short_source = f.count_shorts_on == "z" ? ShortCountSource::Z : ShortCountSource::X;
  cfg.zero_tol = f.zero_tol;
  cfg.lambda_guard =
      f.lambda_guard == "every" ? LambdaGuardTiming::EveryIteration : LambdaGuardTiming::AtConvergence;

  const std::size_t m = p.returns.periods();
  const std::size_t n = p.returns.assets();
  double lambda0 = 0.0;
  if (f.lambda == "auto") {
    lambda0 = initial_lambda(m, n);
  } else {
    std::size_t used = 0;
    try {
      lambda0 = std::stod(f.lambda, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != f.lambda.size() || !std::isfinite(lambda0) || lambda0 < 0.0) {
      throw InputError("--lambda: expected 'auto' or a nonnegative number, got '" + f.lambda + "'");
    }
  }
  if (f.adaptive_lambda) {
    if (!(lambda0 > 0.0)) throw InputError("--adaptive-lambda needs a positive --lambda");
    cfg.lambda = LambdaSchedule::adaptive(lambda0, f.sn, f.max_adjustments);
  } else if (f.lambda == "auto") {
    cfg.lambda = LambdaSchedule::auto_initial(m, n);
  } else {
    cfg.lambda = LambdaSchedule::fixed(lambda0);
  }
  cfg.validate();

  json& e = p.echo;
  e["input"] = f.input;
  e["assets"] = n;
  e["periods"] = m;
  e["strategy"] = f.strategy;
  e["lambda"] = f.lambda;
  e["lambda0"] = lambda0;
  e["lambda_mode"] = std::string(to_string(cfg.lambda.mode));
  e["adaptive_lambda"] = f.adaptive_lambda;
  e["sn"] = f.sn;
  e["max_adjustments"] = f.max_adjustments;
  e["tol"] = f.tol;
  e["max_iter"] = f.max_iter;
  e["rho0"] = f.penalty.rho0;
  e["q"] = f.penalty.q;
  e["nbar"] = f.penalty.nbar;
  e["eta"] = f.penalty.eta;
  e["mu_rb"] = f.penalty.mu_rb;
  e["eps_corr"] = f.penalty.eps_corr;
  e["rho_min"] = f.penalty.rho_min;
  e["rho_max"] = f.penalty.rho_max;
  e["tau_max"] = f.penalty.tau_max;
  e["freeze_after"] = f.penalty.freeze_after;
  e["rbb_alpha_uses_ybar"] = f.penalty.rbb_alpha_uses_ybar;
  e["count_shorts_on"] = f.count_shorts_on;
  e["lambda_guard"] = f.lambda_guard;
  e["jitter_floor"] = f.jitter_floor;
  e["jitter_applied"] = p.stats.jitter_applied;
  e["zero_tol"] = f.zero_tol;
  e["allow_out_of_range"] = f.allow_out_of_range;
  e["seed_independent"] = f.seed_independent;
  return p;
}

double default_target(const AssetStats& stats) {
  return 0.5 * (stats.mu.minCoeff() + stats.mu.maxCoeff());
}

int cmd_gen(const SyntheticMarketSpec& spec, const std::string& output, std::ostream& out,
            std::ostream& err) {
  if (spec.assets < 2) throw InputError("--assets must be at least 2, got " + std::to_string(spec.assets));
  if (spec.periods < 2) {
    throw InputError("--periods must be at least 2, got " + std::to_string(spec.periods));
  }
  if (spec.factor_count < 1) throw InputError("--factors must be at least 1");
  const ReturnsMatrix r = generate_synthetic_returns(spec);
  std::ostringstream text;
  write_returns_csv(r, text);
  return emit(output, text.str(), out, err) ? kExitOk : kExitUsage;
}

int cmd_solve(const SolverFlags& f, const std::string& output, std::ostream& out,
              std::ostream& err) {
  PreparedSolve p = prepare(f);
  const double target = f.target.value_or(default_target(p.stats));
  PortfolioProblem problem;
  try {
    problem = build_problem(p.stats, target, f.allow_out_of_range);
  } catch (const InputError& e) {
    throw InputError(std::string("--target-return / --input: ") + e.what());
  }
  p.echo["target_return"] = target;

  const SolveResult result = solve(problem, p.config);
  const json doc = result_to_json(result, problem, p.echo, f.history);
  if (!emit(output, doc.dump(2) + "\n", out, err)) return kExitUsage;
  return result.termination == Termination::Converged ? kExitOk : kExitNotConverged;
}

struct FrontierFlags {
  std::size_t points = 10;
  std::optional<double> e_min;
  std::optional<double> e_max;
};

int cmd_frontier(const SolverFlags& f, const FrontierFlags& ff, const std::string& output,
                 std::ostream& out, std::ostream& err) {
  if (ff.points < 1) throw InputError("--points must be at least 1");
  PreparedSolve p = prepare(f);
  const double lo = ff.e_min.value_or(p.stats.mu.minCoeff());
  const double hi = ff.e_max.value_or(p.stats.mu.maxCoeff());
  if (!(lo <= hi)) throw InputError("--e-min must not exceed --e-max");

  std::ostringstream csv;
  csv << "e,risk,l1_norm,nonzeros,shorts,iterations,status\n";
  std::size_t converged = 0;
  for (std::size_t i = 0; i < ff.points; ++i) {
    const double e = ff.points == 1
                         ? 0.5 * (lo + hi)
                         : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(ff.points - 1);
    csv << format_plain_decimal(e) << ',';
    try {
      const PortfolioProblem problem = build_problem(p.stats, e, f.allow_out_of_range);
      const SolveResult r = solve(problem, p.config);
      const Vec& x = r.weights.weights;
      csv << format_plain_decimal(x.dot(problem.cov * x)) << ','
          << format_plain_decimal(x.lpNorm<1>()) << ',' << count_nonzeros(x, f.zero_tol) << ','
          << r.short_count << ',' << r.iterations << ',' << to_string(r.termination) << '\n';
      if (r.termination == Termination::Converged) ++converged;
    } catch (const InputError& ex) {
      err << "warning: target " << format_plain_decimal(e) << ": " << ex.what() << '\n';
      csv << ",,,,,error\n";
    }
  }
  if (!emit(output, csv.str(), out, err)) return kExitUsage;
  return converged > 0 ? kExitOk : kExitNotConverged;
}

struct BenchFlags {
  std::string suite = "random";
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  std::size_t assets = 10;
  double tol = 1e-6;
  std::size_t max_iter = 5000;
  PenaltyConfig penalty;
};

int cmd_bench(const BenchFlags& b, const std::string& output, std::ostream& out,
              std::ostream& err) {
  if (b.trials < 1) throw InputError("--trials must be at least 1");
  const Suite suite = *parse_suite(b.suite);
  SolverConfig base;
  base.tol = b.tol;
  base.max_iter = b.max_iter;
  base.penalty = b.penalty;
  base.penalty.validate();
  const std::vector<BenchRow> rows = run_bench(suite, b.trials, b.seed, base, b.assets);

  std::ostringstream csv;
  csv << "suite,strategy,trial,iterations,termination,r_norm,d_norm,wall_ms\n";
  for (const BenchRow& r : rows) {
    csv << to_string(r.suite) << ',' << to_string(r.strategy) << ',' << r.trial << ','
        << r.iterations << ',' << to_string(r.termination) << ',' << format_plain_decimal(r.r_norm)
        << ',' << format_plain_decimal(r.d_norm) << ',' << format_plain_decimal(r.wall_ms) << '\n';
  }
  csv << to_string(suite) << ",summary,median,";
  for (std::size_t i = 0; i < std::size(kAllStrategies); ++i) {
    if (i > 0) csv << ';';
    csv << to_string(kAllStrategies[i]) << '=' << median_iterations(rows, kAllStrategies[i]);
  }
  csv << ",,,,\n";
  return emit(output, csv.str(), out, err) ? kExitOk : kExitUsage;
}

}  // namespace

json result_to_json(const SolveResult& result, const PortfolioProblem& problem,
                    const json& config_echo, bool include_history) {
  const auto to_array = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  const Vec& x = result.weights.weights;
  json doc;
  doc["weights"] = to_array(x);
  doc["objective"] = result.objective;
  doc["iterations"] = result.iterations;
  doc["termination"] = std::string(to_string(result.termination));
  doc["lambda_initial"] = result.lambda_initial;
  doc["lambda_final"] = result.lambda_final;
  doc["rho_final"] = result.rho_final;
  doc["short_count"] = result.short_count;
  doc["config_echo"] = config_echo;

  const ConstraintViolation cv = constraint_violation(problem, x);
  json diag;
  diag["z"] = to_array(result.state.z);
  diag["consensus_gap"] = (x - result.state.z).norm();
  diag["r_norm"] = result.r_norm;
  diag["d_norm"] = result.d_norm;
  diag["lambda_adjustments"] = result.lambda_adjustments;
  diag["multiplier"] = {result.multiplier(0), result.multiplier(1)};
  diag["return_gap"] = cv.return_gap;
  diag["budget_gap"] = cv.budget_gap;
  diag["nonzeros"] = count_nonzeros(x, result.weights.zero_tol);
  doc["diagnostics"] = diag;

  if (include_history) {
    doc["history"] = {{"r_norm", result.history.r_norm},
                      {"d_norm", result.history.d_norm},
                      {"rho", result.history.rho},
                      {"lambda", result.history.lambda}};
  }
  return doc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse mean-variance portfolio selection with adaptive-penalty ADMM", "spadmm"};
  app.require_subcommand(1);

  std::string output;

  SyntheticMarketSpec gen_spec;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic factor-model returns CSV");
  gen->add_option("--assets", gen_spec.assets, "Number of assets (>= 2)")->required();
  gen->add_option("--periods", gen_spec.periods, "Number of periods (>= 2)")->required();
  gen->add_option("--seed", gen_spec.seed, "Random seed")->capture_default_str();
  gen->add_option("--factors", gen_spec.factor_count, "Number of latent factors")->capture_default_str();
  gen->add_option("--noise", gen_spec.noise_scale, "Idiosyncratic noise scale")->capture_default_str();
  add_output_flag(gen, output);

  SolverFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and write a JSON result");
  add_solver_flags(solve_cmd, solve_flags);
  solve_cmd->add_flag("--history", solve_flags.history, "Include per-iteration histories");
  add_output_flag(solve_cmd, output);

  SolverFlags frontier_flags;
  FrontierFlags ff;
  auto* frontier = app.add_subcommand("frontier", "Sweep target returns and write a CSV frontier");
  add_solver_flags(frontier, frontier_flags);
  frontier->add_option("--points", ff.points, "Number of target returns")->capture_default_str();
  frontier->add_option("--e-min", ff.e_min, "Lowest target (default: min of mean returns)");
  frontier->add_option("--e-max", ff.e_max, "Highest target (default: max of mean returns)");
  add_output_flag(frontier, output);

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Compare penalty strategies on a generated suite");
  bench->add_option("--suite", bench_flags.suite, "Instance family")
      ->check(CLI::IsMember({"random", "illcond", "shorts"}))
      ->capture_default_str();
  bench->add_option("--trials", bench_flags.trials, "Instances per suite")->capture_default_str();
  bench->add_option("--seed", bench_flags.seed, "Random seed")->capture_default_str();
  bench->add_option("--assets", bench_flags.assets, "Assets per instance")->capture_default_str();
  bench->add_option("--tol", bench_flags.tol, "Stopping tolerance")->capture_default_str();
  bench->add_option("--max-iter", bench_flags.max_iter, "Iteration limit")->capture_default_str();
  add_penalty_flags(bench, bench_flags.penalty);
  add_output_flag(bench, output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_spec, output, out, err);
    if (solve_cmd->parsed()) return cmd_solve(solve_flags, output, out, err);
    if (frontier->parsed()) return cmd_frontier(frontier_flags, ff, output, out, err);
    if (bench->parsed()) return cmd_bench(bench_flags, output, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SingularSystemError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace spadmm::cli
