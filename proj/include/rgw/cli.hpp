#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rgw::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kValidation = 1, kNumeric = 2, kVerifyFailed = 3 };

/// Runs one subcommand. args excludes the program name. Output without --out goes to out;
/// diagnostics and usage text go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

} // namespace rgw::cli
