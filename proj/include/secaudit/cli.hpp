#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace secaudit::cli {

inline constexpr std::string_view kVersion = "0.1.0";

// Entry point behind the secaudit binary; args exclude the program name.
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 config error.
// Failures also print a one-line JSON error report to stderr.
int run_command(const std::vector<std::string>& args);

}  // namespace secaudit::cli
