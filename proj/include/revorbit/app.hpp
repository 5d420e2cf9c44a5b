#pragma once

#include "revorbit/config.hpp"
#include "revorbit/dynamics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace revorbit::app {

enum ExitCode : int {
    kOk = 0,
    kRuntimeError = 1,
    kConfigError = 2,
    kSingularOnly = 3,
    kNoCircularOrbit = 4,
};

struct CommandOptions {
    std::string format = "json"; // csv | json
    std::optional<std::string> out_dir;
    bool require_bound = false;
    std::uint64_t seed = 1;
};

struct CommandResult {
    int exit_code = kOk;
    std::string out;                          // machine-readable stdout
    std::string log;                          // human summary / errors for stderr
    std::map<std::string, std::string> files; // name -> contents, written under out_dir
};

CommandResult surface_info(const RunConfig& cfg, const CommandOptions& opts);
CommandResult orbit(const RunConfig& cfg, const CommandOptions& opts);
CommandResult apsidal_sweep(const RunConfig& cfg, const CommandOptions& opts);
CommandResult bertrand(const RunConfig& cfg, const CommandOptions& opts);
CommandResult appell_check(const RunConfig& cfg, const CommandOptions& opts);

/// Loads the config, dispatches by subcommand name, and maps exceptions onto
/// exit codes. Files are not written; see write_files.
CommandResult run(const std::string& command, const std::string& config_path, const CommandOptions& opts);

/// Writes result files under dir (created when missing). Throws ConfigError
/// when the directory can not be written.
void write_files(const CommandResult& r, const std::string& dir);

/// %.17g
std::string format_real(double x);

/// Trajectory CSV; E is recomputed per sample, x,y,z appended when embed is set.
std::string trajectory_csv(const Trajectory& traj, const Surface& s, const CentralPotential& p, bool embed);

} // namespace revorbit::app
