#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace srlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One CLI invocation: a subcommand plus the shared flags. `overrides`
/// carries per-command convenience flags as key/value pairs layered on
/// top of the JSON config.
struct RunRequest {
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    int threads = 0;  // 0 = SRCLAB_THREADS, then hardware
    std::vector<std::pair<std::string, std::string>> overrides;
};

std::vector<std::string> command_names();

/// Executes the command, writing result files and manifest.json into
/// out_dir. Returns 0 on success, 2 on config/validation errors, 3 on
/// numeric failure (diagnostic.json written).
int run_command(const RunRequest& req);

}  // namespace srlab
