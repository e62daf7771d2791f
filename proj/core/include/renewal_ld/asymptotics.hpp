#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "renewal_ld/distribution.hpp"
#include "renewal_ld/mc_engine.hpp"

namespace renewal_ld {

struct CurvePoint {
  double x;
  double value;
  std::optional<double> std_error;
};

/// Named (abscissa, value[, stderr]) series; the unit of CSV output.
struct CurveSeries {
  std::string name;
  std::string abscissa = "t";
  std::vector<CurvePoint> points;
  nlohmann::json metadata = nlohmann::json::object();

  /// Abscissae strictly increasing, standard errors non-negative.
  void validate() const;
};

/// phi_t(h) = log(M)/t pointwise; nonpositive MGF values and t <= 0 are
/// dropped and their abscissae appended to `dropped`.
CurveSeries finite_cgf(const CurveSeries& mgf, std::vector<double>* dropped = nullptr);

struct RateFunction {
  CurveSeries rate;     // (k/t, -log(p_k)/t)
  CurveSeries shifted;  // rate - min rate
  std::size_t omitted;  // zero-probability bins
};

RateFunction finite_rate(std::span<const PmfPoint> pmf, double t);

/// M(t,h)/M0(t).
CurveSeries ratio_curve(const CurveSeries& mgf, const WaitingDistribution& dist);

struct TailFit {
  double a;
  double b;
  double residual;
  double t_min;
  double t_max;
  std::size_t n_points;

  nlohmann::json to_json() const;
};

/// Least squares fit of log P - log t = a log M0(t) + b over points with
/// t in [t_min, t_max]; `tail` holds log P[N_t < x t] against t.
/// Throws InsufficientData for < 3 points or constant log M0.
TailFit tail_fit(const CurveSeries& tail, const WaitingDistribution& dist,
                 double t_min = 0.0, double t_max = 1e300);

/// Diagnostic extension: log P = a log M0 + c log t + b with c free.
struct FreeTailFit {
  double a;
  double c;
  double b;
  double residual;
  std::size_t n_points;
};
FreeTailFit tail_fit_free(const CurveSeries& tail, const WaitingDistribution& dist,
                          double t_min = 0.0, double t_max = 1e300);

struct FitWindow {
  double t_min;
  double t_max;
};

/// Largest decade [t*/10, t*] where t* is the largest abscissa whose tail
/// estimate has relative standard error below `max_rel_error`.
/// `tail` holds P (not log P) with standard errors.
FitWindow default_fit_window(const CurveSeries& tail, double max_rel_error = 0.2);

/// Half the mean renewal rate, x = 1/(2 E[tau]): inside the flat region of
/// the limiting rate function.
double default_tail_x(const WaitingDistribution& dist);

/// log P[N_t < x t] series from Monte Carlo, zero-event times omitted.
CurveSeries log_tail_curve(const CountHistogram& hist, double x);

/// x-extent of the contiguous run around the minimum where values < threshold.
double plateau_width(const CurveSeries& shifted, double threshold = 0.01);

}  // namespace renewal_ld
