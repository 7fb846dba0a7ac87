#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lluv::tools {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kPropertyViolation = 4 };

struct Invocation {
  std::string subcommand;  // minimize-f bessel energy minimize-ll sweep localize oracle check
  std::optional<std::string> config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // key=value, applied after the file
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0 = logical cores
};

// Data goes to `out` and files under out_dir; progress and errors to `err`.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

// Parses argv into an Invocation and runs it.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace lluv::tools
