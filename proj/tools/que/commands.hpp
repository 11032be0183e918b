#pragma once

#include <ostream>

#include "config.hpp"
#include "que/errors.hpp"

namespace que::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kBoundViolation = 3 };

/// Runs one command. Progress goes to `log`; results go to files under cfg.out.
/// Returns kBoundViolation when a measured quantity exceeds its theoretical bound.
int run_command(const RunConfig& cfg, std::ostream& log);

/// Maps a library error to an exit code (numerical failures 2, everything else usage).
int exit_code_for(const Error& e);

}  // namespace que::cli
