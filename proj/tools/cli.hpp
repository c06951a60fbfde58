#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace teachbot::cli {

inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kValidationError = 2;

/// Runs one teachbot command. `args` excludes the program name. Returns the
/// process exit code: 0 success, 2 invalid input, 1 runtime failure.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace teachbot::cli
