#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "fraclab/config.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/field.hpp"

namespace fraclab {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,     // a computation failed
    exit_invalid = 2,     // configuration, usage or input mismatch
    exit_exists = 3,      // output directory not empty and --force not given
};

struct CommandOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

/// Raised when an output directory already holds files.
class OutputExists : public Error {
public:
    using Error::Error;
};

int cmd_solve(const std::string& config_path, const CommandOptions& options, std::ostream& log, std::ostream& err);
int cmd_diagnose(const std::string& config_path, const std::string& snapshot_path, const CommandOptions& options,
                 std::ostream& log, std::ostream& err);
int cmd_sweep(const std::string& config_path, const CommandOptions& options, std::ostream& log, std::ostream& err);

/// Building blocks shared by the commands. They throw on failure.
/// Writes manifest.json, field.bin, result.json and energy_history.csv.
FieldMap run_solve(const RunConfig& cfg, const std::filesystem::path& out, bool force);
/// Writes manifest.json and one <index>_<probe>.json/.csv pair per probe.
void run_diagnose(const RunConfig& cfg, const FieldMap& field, const std::filesystem::path& out, bool force,
                  const std::string& snapshot_hash = "");

/// Creates `dir`, refusing a non-empty existing directory unless forced.
void prepare_output(const std::filesystem::path& dir, bool force);

}  // namespace fraclab
