#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace openmax::cli {

struct CommandOutcome {
    // 0 success, 1 domain error, 2 usage or IO error.
    int exit_code = 0;
    std::vector<std::filesystem::path> artifacts_written;
    // Prefixed "error: " or "warning: ".
    std::vector<std::string> diagnostics;
};

// Runs one command line (without the program name). Normal output goes to
// out, diagnostics to err.
CommandOutcome run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace openmax::cli
