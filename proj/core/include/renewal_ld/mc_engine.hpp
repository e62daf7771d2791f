#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "renewal_ld/distribution.hpp"
#include "renewal_ld/time_grid.hpp"

namespace renewal_ld {

struct SimulationConfig {
  WaitingDistribution dist;
  TimeGrid grid;
  std::uint64_t n_traj = 1000000;
  std::uint64_t seed = 1;
  std::uint64_t batch_size = 10000;

  void validate() const;
  /// `{"dist":{...},"grid":{...},"n_traj":N,"seed":S,"batch_size":B}`.
  static SimulationConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Exact per-time counts of trajectories with N_t = k.
class CountHistogram {
 public:
  CountHistogram(TimeGrid grid, std::uint64_t n_traj);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::uint64_t n_traj() const noexcept { return n_traj_; }
  /// counts(i)[k] = #trajectories with N_{t_i} = k; trailing zeros trimmed.
  std::span<const std::uint64_t> counts(std::size_t t_index) const { return counts_.at(t_index); }
  std::uint64_t count(std::size_t t_index, std::size_t k) const;

  void add(std::size_t t_index, std::size_t k, std::uint64_t n = 1);
  /// Adds counts of `other` (same grid); n_traj is left untouched.
  void merge_counts(const CountHistogram& other);

 private:
  TimeGrid grid_;
  std::uint64_t n_traj_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

/// Simulates cfg.n_traj independent trajectories. Trajectory j draws from
/// UniformStream(cfg.seed, j), so the result depends only on
/// (dist, grid, n_traj, seed); batch_size and threads only change scheduling.
CountHistogram simulate_counts(const SimulationConfig& cfg, std::size_t threads = 1);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 1;
};

struct PmfPoint {
  std::size_t k;
  Estimate estimate;
};

/// P[N_t = k] for k = 0..max observed, with binomial standard errors.
std::vector<PmfPoint> estimate_pmf(const CountHistogram& hist, std::size_t t_index);

struct MgfEstimate {
  Estimate estimate;
  bool heavy_tail_unreliable;  // h >= 0
};

/// Sample mean of e^{h N_t}; std_error = sample standard deviation / sqrt(n).
MgfEstimate estimate_mgf(const CountHistogram& hist, std::size_t t_index, double h);

struct TailEstimate {
  Estimate estimate;
  bool no_events;
};

/// Fraction of trajectories with N_t < x t.
TailEstimate estimate_tail(const CountHistogram& hist, std::size_t t_index, double x);

}  // namespace renewal_ld
