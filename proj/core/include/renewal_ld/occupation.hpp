#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "renewal_ld/bounds.hpp"
#include "renewal_ld/distribution.hpp"
#include "renewal_ld/quadrature.hpp"
#include "renewal_ld/time_grid.hpp"

namespace renewal_ld {

struct ConvolutionOptions {
  /// Per panel; tol.abs is raised to tol.rel times a rough value of each half-integral.
  QuadratureTolerance tol{};
  std::size_t threads = 1;
  double first_panel = 1.0 / 1024.0;
};

enum class Provenance { quadrature, monte_carlo };

/// M[k][i] = P[N_{t_i} = k] for 0 <= k <= k_max.
class OccupationTable {
 public:
  OccupationTable(TimeGrid grid, std::vector<std::vector<double>> rows, Provenance provenance);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t k_max() const noexcept { return rows_.size() - 1; }
  std::span<const double> row(std::size_t k) const { return rows_.at(k); }
  double prob(std::size_t k, std::size_t i) const { return rows_.at(k).at(i); }
  Provenance provenance() const noexcept { return provenance_; }

  void append_row(std::vector<double> row);

 private:
  TimeGrid grid_;
  std::vector<std::vector<double>> rows_;
  Provenance provenance_;
};

/// M_k(t) = int_0^t M_{k-1}(t-s) p(s) ds at every grid node, with M_{k-1}
/// given by samples on the grid (interpolated in log-log coordinates).
std::vector<double> convolve_step(std::span<const double> prev, const WaitingDistribution& dist,
                                  const TimeGrid& grid, const ConvolutionOptions& opts = {});

/// Same recursion with M_{k-1} available as a function of time.
std::vector<double> convolve_step(const std::function<double(double)>& prev,
                                  const WaitingDistribution& dist, const TimeGrid& grid,
                                  const ConvolutionOptions& opts = {});

/// Row 0 is the survival function; row 1 convolves it exactly, later rows
/// use the interpolated previous row.
OccupationTable occupation_table(const WaitingDistribution& dist, const TimeGrid& grid,
                                 std::size_t k_max, const ConvolutionOptions& opts = {});

/// Appends rows until table.k_max() == k_max.
void extend_occupation_table(OccupationTable& table, const WaitingDistribution& dist,
                             std::size_t k_max, const ConvolutionOptions& opts = {});

/// P[S_k >= t_i] = sum_{j<k} M_j(t_i).
double tail_prob_Sk(const OccupationTable& table, std::size_t k, std::size_t t_index);

/// P[N_{t_i} < x t_i]; requires the table to cover every k < x t_i.
double prob_count_below(const OccupationTable& table, double x, std::size_t t_index);

struct SeriesValue {
  double value;
  double truncation_bound;
  std::size_t terms;
};

/// M(t,h) = (1-z)/z sum_{k>=1} z^k P[S_k >= t], z = e^h, truncated after
/// k_max+1 terms. The remainder bound is min(z^K, uniform bound) where the
/// uniform bound is used only when `bounds` is given (its m must not exceed
/// the Pareto exponent of the tabulated law). Throws TruncationError when the
/// bound exceeds rel_tol * value. h = 0 returns exactly 1.
SeriesValue mgf_series(const OccupationTable& table, double h, std::size_t t_index,
                       const BoundConstants* bounds = nullptr, double rel_tol = 1e-8);

/// sum_{k<=k_max} e^{hk} M_k(t_i).
double mgf_direct(const OccupationTable& table, double h, std::size_t t_index);

/// Smallest row count k_max for which the certified remainder of mgf_series
/// at (h, t) falls below `tol`.
std::size_t required_k_max(double h, double t, double tol, const BoundConstants* bounds,
                           std::size_t start = 1);

}  // namespace renewal_ld
