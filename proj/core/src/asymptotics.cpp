#include "renewal_ld/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "renewal_ld/errors.hpp"

namespace renewal_ld {

void CurveSeries::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && !(points[i].x > points[i - 1].x)) {
      throw ContractViolation("CurveSeries '" + name + "': abscissae must increase");
    }
    if (points[i].std_error && !(*points[i].std_error >= 0.0)) {
      throw ContractViolation("CurveSeries '" + name + "': negative standard error");
    }
  }
}

CurveSeries finite_cgf(const CurveSeries& mgf, std::vector<double>* dropped) {
  CurveSeries out{mgf.name + "_cgf", mgf.abscissa, {}, mgf.metadata};
  for (const auto& p : mgf.points) {
    if (!(p.x > 0.0) || !(p.value > 0.0)) {
      if (dropped) dropped->push_back(p.x);
      continue;
    }
    CurvePoint q{p.x, std::log(p.value) / p.x, std::nullopt};
    if (p.std_error) q.std_error = *p.std_error / (p.x * p.value);
    out.points.push_back(q);
  }
  return out;
}

RateFunction finite_rate(std::span<const PmfPoint> pmf, double t) {
  if (!(t > 0.0)) throw ContractViolation("finite_rate: t > 0");
  RateFunction out{{"rate", "x", {}, {{"t", t}}}, {"rate_shifted", "x", {}, {{"t", t}}}, 0};
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& p : pmf) {
    if (!(p.estimate.value > 0.0)) {
      ++out.omitted;
      continue;
    }
    const double x = static_cast<double>(p.k) / t;
    const double v = -std::log(p.estimate.value) / t;
    out.rate.points.push_back({x, v, p.estimate.std_error / (t * p.estimate.value)});
    lowest = std::min(lowest, v);
  }
  for (const auto& p : out.rate.points) {
    out.shifted.points.push_back({p.x, p.value - lowest, p.std_error});
  }
  out.rate.metadata["omitted_bins"] = out.omitted;
  out.shifted.metadata["omitted_bins"] = out.omitted;
  return out;
}

CurveSeries ratio_curve(const CurveSeries& mgf, const WaitingDistribution& dist) {
  CurveSeries out{mgf.name + "_ratio", mgf.abscissa, {}, mgf.metadata};
  for (const auto& p : mgf.points) {
    const double m0 = dist.survival(p.x);
    if (!(m0 > 0.0)) throw ContractViolation("ratio_curve: survival underflow");
    CurvePoint q{p.x, p.value / m0, std::nullopt};
    if (p.std_error) q.std_error = *p.std_error / m0;
    out.points.push_back(q);
  }
  return out;
}

nlohmann::json TailFit::to_json() const {
  return {{"a", a},         {"b", b},         {"residual", residual},
          {"t_min", t_min}, {"t_max", t_max}, {"n_points", n_points}};
}

namespace {

struct Design {
  std::vector<double> log_m0;
  std::vector<double> log_t;
  std::vector<double> log_p;
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -std::numeric_limits<double>::infinity();
};

Design collect(const CurveSeries& tail, const WaitingDistribution& dist, double lo, double hi) {
  Design d;
  for (const auto& p : tail.points) {
    if (p.x < lo || p.x > hi || !(p.x > 0.0) || !std::isfinite(p.value)) continue;
    d.log_m0.push_back(std::log(dist.survival(p.x)));
    d.log_t.push_back(std::log(p.x));
    d.log_p.push_back(p.value);
    d.t_min = std::min(d.t_min, p.x);
    d.t_max = std::max(d.t_max, p.x);
  }
  if (d.log_p.size() < 3) throw InsufficientData("tail_fit: fewer than 3 points in the fit window");
  return d;
}

}  // namespace

TailFit tail_fit(const CurveSeries& tail, const WaitingDistribution& dist, double t_min,
                 double t_max) {
  const Design d = collect(tail, dist, t_min, t_max);
  const auto n = static_cast<double>(d.log_p.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < d.log_p.size(); ++i) {
    mx += d.log_m0[i];
    my += d.log_p[i] - d.log_t[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < d.log_p.size(); ++i) {
    const double dx = d.log_m0[i] - mx;
    sxx += dx * dx;
    sxy += dx * (d.log_p[i] - d.log_t[i] - my);
  }
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx) * n)) {
    throw InsufficientData("tail_fit: log M0 is constant over the fit window");
  }
  TailFit fit{};
  fit.a = sxy / sxx;
  fit.b = my - fit.a * mx;
  for (std::size_t i = 0; i < d.log_p.size(); ++i) {
    const double r = d.log_p[i] - d.log_t[i] - fit.a * d.log_m0[i] - fit.b;
    fit.residual += r * r;
  }
  fit.t_min = d.t_min;
  fit.t_max = d.t_max;
  fit.n_points = d.log_p.size();
  return fit;
}

FreeTailFit tail_fit_free(const CurveSeries& tail, const WaitingDistribution& dist, double t_min,
                          double t_max) {
  const Design d = collect(tail, dist, t_min, t_max);
  // Normal equations for columns (log M0, log t, 1), solved by Gaussian
  // elimination with partial pivoting.
  double A[3][4] = {};
  for (std::size_t i = 0; i < d.log_p.size(); ++i) {
    const double row[3] = {d.log_m0[i], d.log_t[i], 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) A[r][c] += row[r] * row[c];
      A[r][3] += row[r] * d.log_p[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int pivot = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[pivot][c])) pivot = r;
    }
    if (std::abs(A[pivot][c]) < 1e-300) throw InsufficientData("tail_fit_free: singular design");
    std::swap(A[c], A[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 4; ++k) A[r][k] -= f * A[c][k];
    }
  }
  FreeTailFit fit{A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2], 0.0, d.log_p.size()};
  for (std::size_t i = 0; i < d.log_p.size(); ++i) {
    const double r = d.log_p[i] - fit.a * d.log_m0[i] - fit.c * d.log_t[i] - fit.b;
    fit.residual += r * r;
  }
  return fit;
}

FitWindow default_fit_window(const CurveSeries& tail, double max_rel_error) {
  double best = -1.0;
  for (const auto& p : tail.points) {
    if (!(p.value > 0.0) || !(p.x > 0.0)) continue;
    const double rel = p.std_error ? *p.std_error / p.value : 0.0;
    if (rel < max_rel_error) best = std::max(best, p.x);
  }
  if (best <= 0.0) throw InsufficientData("default_fit_window: no point with small relative error");
  return {best / 10.0, best};
}

double default_tail_x(const WaitingDistribution& dist) { return 0.5 / dist.mean(); }

CurveSeries log_tail_curve(const CountHistogram& hist, double x) {
  CurveSeries out{"log_tail", "t", {}, {{"x", x}}};
  for (std::size_t i = 0; i < hist.grid().size(); ++i) {
    const double t = hist.grid()[i];
    if (!(t > 0.0)) continue;
    const auto est = estimate_tail(hist, i, x);
    if (est.no_events) continue;
    out.points.push_back({t, std::log(est.estimate.value),
                          est.estimate.std_error / est.estimate.value});
  }
  return out;
}

double plateau_width(const CurveSeries& shifted, double threshold) {
  if (shifted.points.empty()) return 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 1; i < shifted.points.size(); ++i) {
    if (shifted.points[i].value < shifted.points[arg].value) arg = i;
  }
  if (!(shifted.points[arg].value < threshold)) return 0.0;
  std::size_t lo = arg;
  std::size_t hi = arg;
  while (lo > 0 && shifted.points[lo - 1].value < threshold) --lo;
  while (hi + 1 < shifted.points.size() && shifted.points[hi + 1].value < threshold) ++hi;
  return shifted.points[hi].x - shifted.points[lo].x;
}

}  // namespace renewal_ld
