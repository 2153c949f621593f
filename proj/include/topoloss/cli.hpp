#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topoloss::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace topoloss::cli
