#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "spadmm/admm_engine.hpp"
#include "spadmm/market_data.hpp"

namespace spadmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

/// Runs one CLI invocation. `args` excludes the program name. Results go to
/// the file named by -o/--output when given, otherwise to `out`; diagnostics
/// go to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Result document written by `solve`.
nlohmann::json result_to_json(const SolveResult& result, const PortfolioProblem& problem,
                              const nlohmann::json& config_echo, bool include_history);

}  // namespace spadmm::cli
