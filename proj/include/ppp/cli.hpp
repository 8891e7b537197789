#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ppp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitIo = 2;

// Runs one command. `args` excludes the program name. The payload (JSON, or
// CSV with --format csv) goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ppp::cli
