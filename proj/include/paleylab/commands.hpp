#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace paleylab {

enum ExitCode { kExitOk = 0, kExitViolation = 1, kExitInvalid = 2, kExitInternal = 3 };

struct CommandResult {
  int code = kExitOk;
  std::string out;    // JSON or CSV, newline-terminated; empty when written to --out
  std::string error;  // one line, set when code >= 2
};

// args[0] is the subcommand: sets, riesz, replay, verify, optimize, lift,
// measures. workers == 0 means default_workers().
CommandResult run_command(const std::vector<std::string>& args, std::size_t workers = 0);

}  // namespace paleylab
