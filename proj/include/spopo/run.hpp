#pragma once

#include <spopo/config.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spopo {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int config = 2;
inline constexpr int physics = 3;
inline constexpr int comparison = 4;
} // namespace exit_code

struct run_overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> task;
    unsigned threads = 0; // 0: default_thread_count()
};

struct run_outcome
{
    int code = exit_code::ok;
    std::vector<std::filesystem::path> outputs; // relative to the output directory
    std::string summary;
};

/// Applies command-line overrides; throws config_error for an unknown task.
run_config apply_overrides(run_config cfg, const run_overrides& ov);

/// Executes cfg.task, writes its outputs and a manifest into cfg.output_dir.
/// Outputs written before an exception are removed and the exception is
/// rethrown. A failed spectrum comparison keeps its outputs and returns
/// exit_code::comparison.
run_outcome run_task(const run_config& cfg, unsigned threads);

/// Maps the exception types of the library to process exit codes.
int exit_code_for(const std::exception& e);

} // namespace spopo
