#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace draf::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kData = 2;
inline constexpr int kNumerical = 3;
inline constexpr int kOracle = 4;
}  // namespace exit_code

/// Verbs: generate, train, evaluate, sweep, select-gamma, oracle. Settings
/// resolve as defaults < --config file < --set key=value < dedicated flags;
/// the resolved config is echoed to `out` and written to the output
/// directory.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace draf::cli
