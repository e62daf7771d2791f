#pragma once

#include <span>
#include <vector>

namespace renewal_ld {

/// Shape-preserving cubic Hermite interpolant of a positive curve in
/// (log t, log y) coordinates.
///
/// Knot derivatives come from the five-point Lagrange stencil and are then
/// limited (Hyman's filter) wherever the data are monotone over two intervals
/// on either side of a knot; next to a data extremum the stencil derivative is
/// kept. Below the first positive knot the curve is joined to y(0) by a
/// quadratic in t matching value and slope at the knot, clamped to the range
/// of the two values. When y(0) = 0 it is continued as a power law with
/// non-negative exponent instead.
class LogLogInterpolant {
 public:
  /// `times` must start at 0 and be strictly increasing; `values` are the
  /// curve samples (values <= floor are clamped to floor before taking logs).
  LogLogInterpolant(std::span<const double> times, std::span<const double> values,
                    double floor = 1e-300);

  double operator()(double t) const;

 private:
  double value_at_zero_;
  std::vector<double> x_;  // log t for positive knots
  std::vector<double> y_;  // log value
  std::vector<double> d_;  // dy/dx at knots
};

}  // namespace renewal_ld
