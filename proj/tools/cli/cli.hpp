#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccesnet::cli {

inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 1;

// Runs one command line. Library errors exit with their numeric error code
// and print {code, module, message, context} as JSON on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ccesnet::cli
