#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renewal_ld/bounds.hpp"
#include "renewal_ld/distribution.hpp"
#include "renewal_ld/mc_engine.hpp"
#include "renewal_ld/time_grid.hpp"

namespace renewal_ld::cli {

enum class Mode { mc, quadrature, both };

/// Optional explicit bound parameters; missing fields come from
/// estimate_constants.
struct BoundOverrides {
  std::optional<double> cbar;
  std::optional<double> Cm;
  std::optional<double> d;
};

struct FitSettings {
  std::optional<double> t_min;
  std::optional<double> t_max;
  double max_rel_error = 0.2;
  /// Existing tail curve (t,value[,stderr] with value = P[N_t < x t]);
  /// used instead of computing one when set.
  std::optional<std::filesystem::path> tail_csv;
};

/// One experiment. JSON layout (all keys but dist and grid optional):
///
///   {"name": "fig1", "dist": {...}, "grid": {...}, "mode": "mc",
///    "h": [...], "x": [...], "report_times": [...], "n_traj": N,
///    "seed": S, "batch_size": B, "k_max": K, "output": "dir",
///    "bounds": {"cbar": c, "Cm": C, "d": d}, "fit": {...}, "verify": {...}}
///
/// report_times are merged into the grid so they appear as exact nodes.
struct ExperimentConfig {
  std::string name = "experiment";
  WaitingDistribution dist = WaitingDistribution::pareto(3.0);
  TimeGrid grid = TimeGrid::logarithmic(1.0, 1000.0, 31);
  nlohmann::json grid_spec;
  Mode mode = Mode::mc;
  std::vector<double> h;
  std::vector<double> x;  // empty: default_tail_x(dist)
  std::vector<double> report_times;
  std::uint64_t n_traj = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t batch_size = 10000;
  std::optional<std::size_t> k_max;
  std::filesystem::path output = "out";
  BoundOverrides bounds;
  FitSettings fit;
  nlohmann::json verify = nlohmann::json::object();

  /// Throws ConfigError on malformed input or unknown keys.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// Fully resolved form; from_json(to_json()) reproduces the experiment.
  nlohmann::json to_json() const;

  SimulationConfig simulation() const;
  /// x list with the default filled in.
  std::vector<double> tail_x() const;
  /// Positive grid nodes at which rate functions and h-curves are written.
  std::vector<double> resolved_report_times() const;
};

std::string mode_name(Mode mode);

}  // namespace renewal_ld::cli
