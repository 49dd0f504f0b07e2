// Experiment commands behind the ehsim CLI.
#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ehsim/config.hpp"

namespace ehsim {

struct CommandOptions {
    std::optional<std::uint64_t> seed;  // overrides the config's seed
    std::uint32_t threads = 1;
    std::filesystem::path out_dir = ".";
    std::ostream* log = nullptr;  // human-readable summary; nullptr = silent
};

struct CommandResult {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
};

/// run_batched on one configuration -> simulate.csv (+ slot trace if configured).
CommandResult cmd_simulate(const std::filesystem::path& config, const CommandOptions& opts);

/// Every (policy, grid value) cell -> <name>_sweep.csv, <name>_fits.csv, <name>_sweep.gp.
CommandResult cmd_sweep(const std::filesystem::path& spec, const CommandOptions& opts);

/// Exponent tradeoff curve plus simulated operating points.
CommandResult cmd_tradeoff(const std::filesystem::path& spec, const CommandOptions& opts);

/// Exact chain versus simulation; exit code 1 if any ratio exceeds 3 half-widths.
CommandResult cmd_oracle(const std::filesystem::path& config, const CommandOptions& opts);

/// Mean and asymptotic variance. Accepts a JSON spec or, for any other extension, a trace file.
CommandResult cmd_stats(const std::filesystem::path& input, const CommandOptions& opts,
                        std::uint64_t trace_batch_len = 1000);

/// 2 for configuration and input errors, 1 for everything else.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace ehsim
