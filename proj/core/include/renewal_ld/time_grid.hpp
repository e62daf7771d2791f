#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace renewal_ld {

enum class GridStyle { uniform, logarithmic, custom };

/// Strictly increasing finite times starting at t0 = 0.
class TimeGrid {
 public:
  /// 0, dt, 2dt, ..., t_max with `points` positive nodes.
  static TimeGrid uniform(double t_max, std::size_t points);
  /// 0 followed by `points` log-spaced nodes from t_min to t_max inclusive.
  static TimeGrid logarithmic(double t_min, double t_max, std::size_t points);
  /// Logarithmic grid with a fixed number of nodes per decade.
  static TimeGrid per_decade(double t_min, double t_max, std::size_t per_decade);
  /// Validates; a leading 0 is inserted when missing.
  static TimeGrid from_points(std::vector<double> times);

  /// `{"style":"log","t_min":1,"t_max":1000,"points":31}` or
  /// `{"style":"uniform","t_max":100,"points":100}` or `{"times":[...]}`.
  static TimeGrid from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Union with `extra`; a node of *this within `rel_tol` of an extra node is
  /// replaced by that node so the extra times appear exactly.
  TimeGrid merged_with(std::span<const double> extra, double rel_tol = 1e-6) const;

  std::span<const double> times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  double t_max() const noexcept { return times_.back(); }
  GridStyle style() const noexcept { return style_; }

  /// Index of the node equal to t within relative tolerance.
  std::optional<std::size_t> index_of(double t, double rel_tol = 1e-9) const;
  /// Index of the nearest node.
  std::size_t nearest_index(double t) const;

 private:
  TimeGrid(std::vector<double> times, GridStyle style);
  std::vector<double> times_;
  GridStyle style_;
};

/// Log-spaced values from lo to hi inclusive (n >= 2), exact at both ends.
std::vector<double> logspace(double lo, double hi, std::size_t n);
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace renewal_ld
