#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tcmax::cli {

enum ExitCode : int {
    kOk = 0,
    kInvalidInput = 1, ///< schema, validation, probability or usage error
    kNegative = 2,     ///< negative verdict (arbitrage, not maximal, infeasible)
    kInternal = 3,     ///< self-check failure
};

/// Runs one subcommand; `args` excludes the program name. The report goes to
/// `out`, usage errors to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tcmax::cli
