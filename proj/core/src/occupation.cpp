#include "renewal_ld/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "renewal_ld/errors.hpp"
#include "renewal_ld/interpolation.hpp"
#include "renewal_ld/parallel.hpp"

namespace renewal_ld {
namespace {

template <class Prev>
std::vector<double> convolve_impl(const Prev& prev, const WaitingDistribution& dist,
                                  const TimeGrid& grid, const ConvolutionOptions& opts) {
  std::vector<double> out(grid.size(), 0.0);
  QuadratureTolerance half = opts.tol;
  half.abs *= 0.5;
  parallel_for(grid.size(), opts.threads, [&](std::size_t i, std::size_t) {
    const double t = grid[i];
    if (t == 0.0) return;
    // Split at t/2: the density is sharp near s = 0, the previous row near
    // u = t - s = 0; each half is graded toward its own sharp end.
    const double mid = 0.5 * t;
    const auto jump_f = [&](double s) { return prev(t - s) * dist.pdf(s); };
    const auto origin_f = [&](double u) { return prev(u) * dist.pdf(t - u); };
    // Absolute floor: rel times a single-pass G20 estimate of the half-integral.
    const auto scaled = [&](const auto& f) {
      const QuadratureTolerance single{std::numeric_limits<double>::infinity(), 0.0, 0};
      QuadratureTolerance tol = half;
      tol.abs = std::max(half.abs,
                         half.rel * std::abs(integrate_graded(f, 0.0, mid, single, opts.first_panel).value));
      return tol;
    };
    const auto near_jump = integrate_graded(jump_f, 0.0, mid, scaled(jump_f), opts.first_panel);
    const auto near_origin = integrate_graded(origin_f, 0.0, mid, scaled(origin_f), opts.first_panel);
    if (!near_jump.converged || !near_origin.converged) {
      throw QuadratureError("convolve_step: quadrature did not converge", t);
    }
    out[i] = std::clamp(near_jump.value + near_origin.value, 0.0, 1.0);
  });
  return out;
}

}  // namespace

OccupationTable::OccupationTable(TimeGrid grid, std::vector<std::vector<double>> rows,
                                 Provenance provenance)
    : grid_(std::move(grid)), rows_(std::move(rows)), provenance_(provenance) {
  if (rows_.empty()) throw ContractViolation("OccupationTable: at least one row");
  for (const auto& r : rows_) {
    if (r.size() != grid_.size()) throw ContractViolation("OccupationTable: row length");
  }
}

void OccupationTable::append_row(std::vector<double> row) {
  if (row.size() != grid_.size()) throw ContractViolation("OccupationTable: row length");
  rows_.push_back(std::move(row));
}

std::vector<double> convolve_step(std::span<const double> prev, const WaitingDistribution& dist,
                                  const TimeGrid& grid, const ConvolutionOptions& opts) {
  if (prev.size() != grid.size()) throw ContractViolation("convolve_step: prev/grid size");
  if (std::all_of(prev.begin(), prev.end(), [](double v) { return v == 0.0; })) {
    return std::vector<double>(grid.size(), 0.0);
  }
  const LogLogInterpolant curve(grid.times(), prev);
  return convolve_impl(curve, dist, grid, opts);
}

std::vector<double> convolve_step(const std::function<double(double)>& prev,
                                  const WaitingDistribution& dist, const TimeGrid& grid,
                                  const ConvolutionOptions& opts) {
  return convolve_impl(prev, dist, grid, opts);
}

OccupationTable occupation_table(const WaitingDistribution& dist, const TimeGrid& grid,
                                 std::size_t k_max, const ConvolutionOptions& opts) {
  std::vector<double> m0(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m0[i] = dist.survival(grid[i]);
  OccupationTable table(grid, {std::move(m0)}, Provenance::quadrature);
  extend_occupation_table(table, dist, k_max, opts);
  return table;
}

void extend_occupation_table(OccupationTable& table, const WaitingDistribution& dist,
                             std::size_t k_max, const ConvolutionOptions& opts) {
  while (table.k_max() < k_max) {
    if (table.k_max() == 0) {
      const auto survival = [&dist](double u) { return dist.survival(u); };
      table.append_row(convolve_impl(survival, dist, table.grid(), opts));
    } else {
      table.append_row(convolve_step(table.row(table.k_max()), dist, table.grid(), opts));
    }
  }
}

double tail_prob_Sk(const OccupationTable& table, std::size_t k, std::size_t t_index) {
  if (k < 1 || k - 1 > table.k_max()) {
    throw ContractViolation("tail_prob_Sk: need 1 <= k <= k_max + 1");
  }
  if (t_index >= table.grid().size()) throw ContractViolation("tail_prob_Sk: t index");
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) sum += table.prob(j, t_index);
  return sum;
}

double prob_count_below(const OccupationTable& table, double x, std::size_t t_index) {
  if (!(x > 0.0)) throw ContractViolation("prob_count_below: x > 0");
  const double t = table.grid()[t_index];
  const double limit = x * t;
  // Counts k with k < x t.
  const auto count = static_cast<std::size_t>(std::ceil(limit));
  if (count == 0) return 0.0;
  if (count - 1 > table.k_max()) {
    throw ContractViolation("prob_count_below: table does not reach k = ceil(x t) - 1");
  }
  return tail_prob_Sk(table, count, t_index);
}

std::size_t required_k_max(double h, double t, double tol, const BoundConstants* bounds,
                           std::size_t start) {
  const double z = std::exp(h);
  const double m0 = bounds ? std::exp(-(bounds->m - 1.0) * std::log1p(t)) : 0.0;
  for (std::size_t k_max = std::max<std::size_t>(start, 1); k_max < 1000000; ++k_max) {
    const std::size_t terms = k_max + 1;
    double rem = std::pow(z, static_cast<double>(terms));
    if (bounds) rem = std::min(rem, series_remainder_bound(*bounds, z, terms, t, m0));
    if (rem <= tol) return k_max;
  }
  return 1000000;
}

SeriesValue mgf_series(const OccupationTable& table, double h, std::size_t t_index,
                       const BoundConstants* bounds, double rel_tol) {
  if (std::isnan(h) || h > 0.0) throw ContractViolation("mgf_series: requires h <= 0");
  if (t_index >= table.grid().size()) throw ContractViolation("mgf_series: t index");
  if (h == 0.0) return {1.0, 0.0, 0};
  const double z = std::exp(h);
  if (z == 0.0) return {table.prob(0, t_index), 0.0, 1};

  const std::size_t terms = table.k_max() + 1;
  double cumulative = 0.0;  // P[S_k >= t]
  double weight = 1.0 - z;  // (1-z) z^(k-1)
  double value = 0.0;
  for (std::size_t k = 1; k <= terms; ++k) {
    cumulative += table.prob(k - 1, t_index);
    value += weight * cumulative;
    weight *= z;
  }

  const double t = table.grid()[t_index];
  double remainder = std::pow(z, static_cast<double>(terms));
  if (bounds) {
    const double m0 = std::exp(-(bounds->m - 1.0) * std::log1p(t));
    remainder = std::min(remainder, series_remainder_bound(*bounds, z, terms, t, m0));
  }
  const double tol = std::max(rel_tol * value, 1e-300);
  if (remainder > tol) {
    const std::size_t need = required_k_max(h, t, tol, bounds, table.k_max());
    std::ostringstream os;
    os << "mgf_series: remainder bound " << remainder << " exceeds " << tol << " at t=" << t
       << ", h=" << h << "; need k_max >= " << need;
    throw TruncationError(os.str(), need);
  }
  return {value, remainder, terms};
}

double mgf_direct(const OccupationTable& table, double h, std::size_t t_index) {
  if (t_index >= table.grid().size()) throw ContractViolation("mgf_direct: t index");
  double sum = 0.0;
  for (std::size_t k = 0; k <= table.k_max(); ++k) {
    sum += std::exp(h * static_cast<double>(k)) * table.prob(k, t_index);
  }
  return sum;
}

}  // namespace renewal_ld
