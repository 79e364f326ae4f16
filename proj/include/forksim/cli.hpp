#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace forksim {

inline constexpr const char* kToolVersion = "0.1.0";

/// Command-line entry point, shared by the binary and the test suites.
/// args excludes the program name. Returns the process exit code:
/// 0 success, 2 input or usage error, 3 runtime or numeric fault.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

} // namespace forksim
