#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbmo::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,         // bad flags, config or input
  exit_check_failed = 2,  // verify ran but some statement failed
};

/// Runs one subcommand (norm, op, cbmo, herz, verify, report). args excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbmo::cli
