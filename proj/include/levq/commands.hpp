#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "levq/config.hpp"
#include "levq/csv.hpp"
#include "levq/error.hpp"

namespace levq {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes shared by all commands.
enum ExitCode : int { exit_ok = 0, exit_unstable = 2, exit_unsupported = 3, exit_numerical = 4 };

int exit_code_for(ErrorKind kind) noexcept;

struct RunReport {
    std::string command;
    std::string digest;  // SHA-256 of the canonical config
    std::vector<std::pair<std::string, Table>> tables;
    std::vector<std::filesystem::path> outputs;  // files written under --out
    double seconds = 0.0;
    std::string version = kVersion;
    std::string text;  // plain-text summary
    int exit_code = exit_ok;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one command. With out set, every table goes to out/<command>_<name>.csv
/// and the summary to out/<command>_report.txt. Library errors propagate.
RunReport run_command(std::string_view command, const ModelConfig& config,
                      const std::optional<std::filesystem::path>& out = std::nullopt);

/// Summary followed by the tables that were not written to files.
std::string render(const RunReport& report);

}  // namespace levq
