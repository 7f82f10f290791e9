#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fluidalg::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNumerical = 2,
    kExitValidation = 3,
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Writes trace.csv, state.csv and summary.json into the output directory.
int cmd_simulate(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& output,
                 const std::vector<std::string>& overrides, std::ostream& log);

/// Runs the identity suite and writes diagnostics.json.
int cmd_diagnose(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& output,
                 std::ostream& log);

int cmd_instances(std::ostream& out);

/// Entry point behind the `fluidalg` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fluidalg::cli
