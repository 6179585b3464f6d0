#pragma once

// Command-line front end. Exit codes: 0 success, 1 precondition or schema
// error, 2 numerical-budget error, 3 verification failure.

#include <iosfwd>
#include <string>
#include <vector>

#include "rsm/config.hpp"
#include "rsm/error.hpp"
#include "rsm/green.hpp"

namespace rsm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitVerify = 3;

/// Exit code for a library error.
int exit_code(const Error& e);

/// Cubic-spline source from a CSV file with columns r,f starting at r = 0;
/// zero beyond the last sample.
RadialSource file_source(const std::string& path);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsm
