#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sauce {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kManifestSchemaVersion = 1;

enum ExitCode : int {
  kExitSuccess = 0,
  kExitUsage = 2,    // bad flags or unreadable/invalid input
  kExitNumeric = 3,  // internal numeric failure
};

/// Runs one CLI command; `args` excludes the program name.
/// Every command writes <output>.manifest.json next to its primary output.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sauce
