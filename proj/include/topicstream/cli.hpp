#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace topicstream {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Parses and runs one subcommand. `args` excludes the program name.
// Returns 0 on success, 2 on input/validation errors, 3 on runtime failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topicstream
