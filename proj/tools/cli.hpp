#ifndef LABELSPLIT_TOOLS_CLI_HPP
#define LABELSPLIT_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace labelsplit::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kInputError = 2,
    kRefinementError = 3,
};

/// Runs the command line `args` (without the program name). Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace labelsplit::cli

#endif // LABELSPLIT_TOOLS_CLI_HPP
