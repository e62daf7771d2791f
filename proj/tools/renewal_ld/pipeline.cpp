#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "renewal_ld/csv.hpp"
#include "renewal_ld/errors.hpp"

namespace renewal_ld::cli {
namespace {

constexpr std::size_t kRowLimit = 20000;
constexpr double kPmfDeficit = 1e-9;
constexpr double kNegligibleRow = 1e-15;
constexpr double kSeriesRelTol = 1e-8;
constexpr std::size_t kNodesPerDecade = 60;

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double pmf_deficit(const OccupationTable& table, std::size_t i) {
  double sum = 0.0;
  for (std::size_t k = 0; k <= table.k_max(); ++k) sum += table.prob(k, i);
  return 1.0 - sum;
}

}  // namespace

ResolvedBounds resolve_bounds(const WaitingDistribution& dist, const BoundOverrides& overrides) {
  ResolvedBounds out;
  const auto m = dist.integer_pareto_exponent();
  if (!m) {
    out.note = "uniform bounds need a Pareto law with integer exponent m >= 3; got " +
               dist.describe();
    return out;
  }
  BoundConstants bc;
  if (!overrides.cbar || !overrides.Cm) {
    out.estimated = estimate_constants(*m);
    bc = out.estimated->constants;
    out.note = "estimated";
  } else {
    bc.m = *m;
    out.note = "config";
  }
  bc.m = *m;
  if (overrides.cbar) bc.cbar = *overrides.cbar;
  if (overrides.Cm) bc.Cm = *overrides.Cm;
  if (overrides.d) bc.d = *overrides.d;
  if (overrides.cbar || overrides.Cm || overrides.d) out.note += " with config overrides";
  out.constants = bc;
  return out;
}

TimeGrid quadrature_grid(const TimeGrid& grid, std::span<const double> extra) {
  std::vector<double> nodes(extra.begin(), extra.end());
  for (double t : grid.times()) {
    if (t > 0.0) nodes.push_back(t);
  }
  if (nodes.empty()) throw ConfigError("quadrature needs a grid with a positive time");
  const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
  const double t_lo = std::min(1e-3, *lo);
  if (!(*hi > t_lo)) return TimeGrid::from_points(sorted_unique(nodes));
  return TimeGrid::per_decade(t_lo, *hi, kNodesPerDecade).merged_with(nodes, 1e-2);
}

ConvolutionOptions quadrature_options(std::size_t threads) {
  ConvolutionOptions opts;
  opts.tol = {1e-30, 1e-10, 30};
  opts.threads = threads;
  return opts;
}

OccupationTable build_table(const ExperimentConfig& cfg, const BoundConstants* bounds,
                            std::size_t threads, bool complete_pmf) {
  const auto opts = quadrature_options(threads);
  const TimeGrid grid = quadrature_grid(cfg.grid);
  if (cfg.k_max) return occupation_table(cfg.dist, grid, std::max<std::size_t>(*cfg.k_max, 1), opts);

  std::size_t k = 1;
  for (double h : cfg.h) {
    if (!(h < 0.0)) continue;
    for (double t : grid.times()) {
      if (t == 0.0) continue;
      const double tol = 0.5 * kSeriesRelTol * cfg.dist.survival(t);
      if (!(tol > 0.0)) continue;
      k = std::max(k, required_k_max(h, t, tol, bounds, k));
    }
  }
  for (double x : cfg.tail_x()) {
    k = std::max(k, static_cast<std::size_t>(std::ceil(x * grid.t_max())));
  }
  k = std::min(k, kRowLimit);
  OccupationTable table = occupation_table(cfg.dist, grid, k, opts);
  if (!complete_pmf) return table;

  std::vector<std::size_t> report;
  for (double t : cfg.resolved_report_times()) report.push_back(grid.nearest_index(t));
  // A deficit left once the rows have died out is quadrature error.
  const auto complete = [&] {
    return std::all_of(report.begin(), report.end(), [&](std::size_t i) {
      return pmf_deficit(table, i) <= kPmfDeficit || table.prob(table.k_max(), i) <= kNegligibleRow;
    });
  };
  while (!complete() && table.k_max() < kRowLimit) {
    const std::size_t step = std::max<std::size_t>(16, table.k_max() / 4);
    extend_occupation_table(table, cfg.dist, std::min(kRowLimit, table.k_max() + step), opts);
  }
  return table;
}

CurveSeries mgf_curve(const CountHistogram& hist, double h) {
  CurveSeries out{"mgf", "t", {}, {{"h", h}, {"source", "mc"}}};
  bool unreliable = false;
  for (std::size_t i = 0; i < hist.grid().size(); ++i) {
    const auto est = estimate_mgf(hist, i, h);
    unreliable = unreliable || est.heavy_tail_unreliable;
    out.points.push_back({hist.grid()[i], est.estimate.value, est.estimate.std_error});
  }
  out.metadata["heavy_tail_unreliable"] = unreliable;
  return out;
}

CurveSeries mgf_curve(const OccupationTable& table, double h, const BoundConstants* bounds) {
  CurveSeries out{"mgf", "t", {}, {{"h", h}, {"source", "quadrature"}}};
  double worst = 0.0;
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    const auto s = mgf_series(table, h, i, bounds, kSeriesRelTol);
    worst = std::max(worst, s.value > 0.0 ? s.truncation_bound / s.value : 0.0);
    out.points.push_back({table.grid()[i], s.value, std::nullopt});
  }
  out.metadata["max_relative_truncation"] = worst;
  return out;
}

CurveSeries tail_curve(const CountHistogram& hist, double x) {
  CurveSeries out{"tail", "t", {}, {{"x", x}, {"source", "mc"}}};
  for (std::size_t i = 0; i < hist.grid().size(); ++i) {
    const double t = hist.grid()[i];
    if (!(t > 0.0)) continue;
    const auto est = estimate_tail(hist, i, x);
    if (est.no_events) continue;
    out.points.push_back({t, est.estimate.value, est.estimate.std_error});
  }
  return out;
}

CurveSeries tail_curve(const OccupationTable& table, double x) {
  CurveSeries out{"tail", "t", {}, {{"x", x}, {"source", "quadrature"}}};
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    const double t = table.grid()[i];
    if (!(t > 0.0)) continue;
    out.points.push_back({t, prob_count_below(table, x, i), std::nullopt});
  }
  return out;
}

CurveSeries log_curve(const CurveSeries& tail) {
  CurveSeries out{"log_" + tail.name, tail.abscissa, {}, tail.metadata};
  for (const auto& p : tail.points) {
    if (!(p.value > 0.0)) continue;
    std::optional<double> se;
    if (p.std_error) se = *p.std_error / p.value;
    out.points.push_back({p.x, std::log(p.value), se});
  }
  return out;
}

CurveSeries cgf_over_h(const CountHistogram& hist, std::size_t i, const std::vector<double>& h) {
  const double t = hist.grid()[i];
  CurveSeries out{"cgf", "h", {}, {{"t", t}, {"source", "mc"}}};
  if (!(t > 0.0)) return out;
  for (double v : sorted_unique(h)) {
    const auto est = estimate_mgf(hist, i, v);
    const double M = est.estimate.value;
    if (!(M > 0.0)) continue;
    out.points.push_back({v, std::log(M) / t, est.estimate.std_error / (M * t)});
  }
  return out;
}

CurveSeries cgf_over_h(const OccupationTable& table, std::size_t i, const std::vector<double>& h,
                       const BoundConstants* bounds) {
  const double t = table.grid()[i];
  CurveSeries out{"cgf", "h", {}, {{"t", t}, {"source", "quadrature"}}};
  if (!(t > 0.0)) return out;
  for (double v : sorted_unique(h)) {
    if (v > 0.0) continue;
    const double M = mgf_series(table, v, i, bounds, kSeriesRelTol).value;
    if (M > 0.0) out.points.push_back({v, std::log(M) / t, std::nullopt});
  }
  return out;
}

std::vector<PmfPoint> table_pmf(const OccupationTable& table, std::size_t i) {
  std::vector<PmfPoint> out;
  for (std::size_t k = 0; k <= table.k_max(); ++k) {
    // Entries this small are below the accuracy of the recursion.
    const double p = table.prob(k, i);
    if (p > 1e-250) out.push_back({k, {p, 0.0, 1}});
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_)) {
    throw IoError("cannot create output directory '" + root_.string() + "'");
  }
}

std::filesystem::path OutputDir::prepare(const std::string& relative) {
  const auto path = root_ / relative;
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  files_.push_back(relative);
  return path;
}

template <class T>
void OutputDir::csv(const std::string& relative, const T& data) {
  write_csv_file(prepare(relative), data);
}

template void OutputDir::csv(const std::string&, const CurveSeries&);
template void OutputDir::csv(const std::string&, const OccupationTable&);
template void OutputDir::csv(const std::string&, const CountHistogram&);

void OutputDir::text(const std::string& relative, const std::string& content) {
  const auto path = prepare(relative);
  std::ofstream os(path, std::ios::binary);
  os << content;
  os.close();
  if (!os) throw IoError("cannot write '" + path.string() + "'");
}

void OutputDir::json(const std::string& relative, const nlohmann::json& j) {
  text(relative, j.dump(2) + "\n");
}

std::string tag(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  std::string s(buf);
  s.erase(std::remove(s.begin(), s.end(), '+'), s.end());
  return s;
}

nlohmann::json metadata(const ExperimentConfig& cfg, const std::string& command,
                        const OutputDir& out, const nlohmann::json& extra) {
  nlohmann::json j{{"tool", "renewal-ld"},
                   {"version", RENEWAL_LD_VERSION},
                   {"command", command},
                   {"config", cfg.to_json()},
                   {"files", out.files()}};
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

}  // namespace renewal_ld::cli
