#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "gameopt/cli/config.hpp"

namespace gameopt::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kInfeasible = 2,
    kInternalError = 3,
};

/// Command-line overrides applied on top of the configuration.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
    bool oracle = false;
};

RunConfig apply_overrides(RunConfig config, const Overrides& overrides);

/// Each command writes its files under config.run.out plus a manifest.json,
/// prints a short summary to `log`, and returns an ExitCode.
int cmd_validate(const RunConfig& config, std::ostream& log);
int cmd_price(const RunConfig& config, bool oracle, std::ostream& log);
int cmd_study(const RunConfig& config, std::ostream& log);

/// Loads the configuration, applies overrides and dispatches `command`,
/// mapping exceptions to exit codes.
int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                std::ostream& log, std::ostream& err);

}  // namespace gameopt::cli
