#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace toedit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitProvider = 4;

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out`; failures are reported on `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toedit::cli
