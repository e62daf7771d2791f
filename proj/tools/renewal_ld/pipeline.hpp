#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "experiment.hpp"
#include "renewal_ld/asymptotics.hpp"
#include "renewal_ld/bounds.hpp"
#include "renewal_ld/mc_engine.hpp"
#include "renewal_ld/occupation.hpp"

namespace renewal_ld::cli {

/// Estimated constants for integer Pareto exponents with the config
/// overrides applied; nullopt (with a reason) for other laws.
struct ResolvedBounds {
  std::optional<BoundConstants> constants;
  std::optional<EstimatedConstants> estimated;
  std::string note;
};
ResolvedBounds resolve_bounds(const WaitingDistribution& dist, const BoundOverrides& overrides);

/// Rows needed by an experiment: certified mgf series for every h < 0,
/// P[N_t < x t] for every x, and (when `complete_pmf`) enough rows that the
/// pmf at every report time sums to within 1e-9 of one or its last row is
/// below 1e-15. An explicit k_max in
/// the config wins.
OccupationTable build_table(const ExperimentConfig& cfg, const BoundConstants* bounds,
                            std::size_t threads, bool complete_pmf = true);

/// Dense log grid (60 nodes per decade from min(1e-3, first node)) holding
/// every positive node of `grid` and `extra` exactly; the interpolation
/// error of the recursion is set by this spacing.
TimeGrid quadrature_grid(const TimeGrid& grid, std::span<const double> extra = {});

/// Convolution options with an absolute tolerance far below the smallest
/// probabilities of interest, so accuracy is governed by the relative one.
ConvolutionOptions quadrature_options(std::size_t threads);

// Curves over the time grid.
CurveSeries mgf_curve(const CountHistogram& hist, double h);
CurveSeries mgf_curve(const OccupationTable& table, double h, const BoundConstants* bounds);
/// P[N_t < x t] with value = probability (zero-event times omitted for MC).
CurveSeries tail_curve(const CountHistogram& hist, double x);
CurveSeries tail_curve(const OccupationTable& table, double x);
/// log P[N_t < x t]; stderr propagated as se/P when present.
CurveSeries log_curve(const CurveSeries& tail);

/// phi_t(h) at grid index i over the sorted h list (abscissa h).
CurveSeries cgf_over_h(const CountHistogram& hist, std::size_t i, const std::vector<double>& h);
CurveSeries cgf_over_h(const OccupationTable& table, std::size_t i, const std::vector<double>& h,
                       const BoundConstants* bounds);

std::vector<PmfPoint> table_pmf(const OccupationTable& table, std::size_t i);

/// Writes files below a run directory and remembers their relative names.
class OutputDir {
 public:
  /// Creates the directory; throws IoError when it is not writable.
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

  template <class T>
  void csv(const std::string& relative, const T& data);
  void text(const std::string& relative, const std::string& content);
  void json(const std::string& relative, const nlohmann::json& j);

 private:
  std::filesystem::path prepare(const std::string& relative);
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

/// Filename-safe rendering of a parameter value ("%.10g", '+' dropped).
std::string tag(double v);

/// The metadata sidecar: resolved config, tool version, command, files.
nlohmann::json metadata(const ExperimentConfig& cfg, const std::string& command,
                        const OutputDir& out, const nlohmann::json& extra);

}  // namespace renewal_ld::cli
