#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epkit::cli {

enum ExitCode : int { ok = 0, usage = 1, data = 2, numeric = 3 };

// Runs one subcommand; `args` excludes the program name. Messages go to
// `out`/`err`, results to files.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epkit::cli
