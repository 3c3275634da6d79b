#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace retrax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the command line. Output that a subcommand would print goes to `out`,
/// diagnostics to `err`; `in` stands in for stdin.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

struct FlagDoc {
    std::string name;         // e.g. "--profile" or positional name
    std::string description;
};

/// Flags of each subcommand as registered with the parser, for docs checks.
std::vector<std::pair<std::string, std::vector<FlagDoc>>> subcommand_flags();

}  // namespace retrax::cli
