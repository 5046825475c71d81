#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evbreak::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNumeric = 3,
};

/// Runs the command line `args` (args[0] is the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a file's bytes.
std::string file_sha256(const std::string& path);

}  // namespace evbreak::cli
