#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "experiment.hpp"

namespace renewal_ld::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kIoError = 3,
  kInsufficientData = 4,
  kVerificationFailed = 5,
};

struct RunOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

/// Applies --out/--seed to a loaded config.
ExperimentConfig apply_options(ExperimentConfig cfg, const RunOptions& opts);

// Each command writes below cfg.output and returns a process exit code.
// Errors propagate as exceptions; run_command maps them to exit codes.
int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts);
/// cmd_simulate with the engine forced to quadrature.
int cmd_quadrature(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_verify(const ExperimentConfig& cfg, const RunOptions& opts);
int cmd_fit(const ExperimentConfig& cfg, const RunOptions& opts);

/// Loads the config and dispatches `command`; prints errors to stderr.
int run_command(const std::string& command, const std::filesystem::path& config,
                const RunOptions& opts);

}  // namespace renewal_ld::cli
