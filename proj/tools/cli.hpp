#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace legalrag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. `in` feeds the interactive `chat` loop.
int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace legalrag::cli
