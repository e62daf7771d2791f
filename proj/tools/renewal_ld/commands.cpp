#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "pipeline.hpp"
#include "renewal_ld/csv.hpp"
#include "renewal_ld/errors.hpp"
#include "verify.hpp"

namespace renewal_ld::cli {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const BoundConstants* bounds_ptr(const ResolvedBounds& rb) {
  if (!rb.constants) return nullptr;
  try {
    rb.constants->validate();
  } catch (const ContractViolation&) {
    return nullptr;
  }
  return &*rb.constants;
}

nlohmann::json bounds_json(const ResolvedBounds& rb) {
  nlohmann::json j{{"note", rb.note}};
  if (rb.constants) j["constants"] = {{"m", rb.constants->m}, {"cbar", rb.constants->cbar},
                                      {"Cm", rb.constants->Cm}, {"d", rb.constants->d}};
  return j;
}

void write_mc(const ExperimentConfig& cfg, const CountHistogram& hist, OutputDir& out) {
  out.csv("mc/histogram.csv", hist);
  for (double h : cfg.h) {
    const auto mgf = mgf_curve(hist, h);
    out.csv("mc/mgf_h" + tag(h) + ".csv", mgf);
    out.csv("mc/cgf_h" + tag(h) + ".csv", finite_cgf(mgf));
    out.csv("mc/ratio_h" + tag(h) + ".csv", ratio_curve(mgf, cfg.dist));
  }
  for (double t : cfg.resolved_report_times()) {
    const std::size_t i = hist.grid().nearest_index(t);
    const auto pmf = estimate_pmf(hist, i);
    const auto rate = finite_rate(pmf, hist.grid()[i]);
    out.csv("mc/rate_t" + tag(t) + ".csv", rate.rate);
    out.csv("mc/rate_shifted_t" + tag(t) + ".csv", rate.shifted);
    if (!cfg.h.empty()) out.csv("mc/cgf_t" + tag(t) + ".csv", cgf_over_h(hist, i, cfg.h));
  }
  for (double x : cfg.tail_x()) out.csv("mc/tail_x" + tag(x) + ".csv", tail_curve(hist, x));
}

nlohmann::json write_quadrature(const ExperimentConfig& cfg, const OccupationTable& table,
                                const BoundConstants* bounds, OutputDir& out) {
  nlohmann::json skipped = nlohmann::json::array();
  out.csv("quadrature/occupation.csv", table);
  for (double h : cfg.h) {
    if (h > 0.0) {
      skipped.push_back({{"h", h}, {"reason", "series diverges for h > 0 under heavy tails"}});
      continue;
    }
    try {
      const auto mgf = mgf_curve(table, h, bounds);
      out.csv("quadrature/mgf_h" + tag(h) + ".csv", mgf);
      out.csv("quadrature/cgf_h" + tag(h) + ".csv", finite_cgf(mgf));
      out.csv("quadrature/ratio_h" + tag(h) + ".csv", ratio_curve(mgf, cfg.dist));
    } catch (const TruncationError& e) {
      skipped.push_back({{"h", h}, {"reason", e.what()}});
    }
  }
  for (double t : cfg.resolved_report_times()) {
    const std::size_t i = table.grid().nearest_index(t);
    const auto pmf = table_pmf(table, i);
    const auto rate = finite_rate(pmf, table.grid()[i]);
    out.csv("quadrature/rate_t" + tag(t) + ".csv", rate.rate);
    out.csv("quadrature/rate_shifted_t" + tag(t) + ".csv", rate.shifted);
    if (!cfg.h.empty()) {
      try {
        out.csv("quadrature/cgf_t" + tag(t) + ".csv", cgf_over_h(table, i, cfg.h, bounds));
      } catch (const TruncationError& e) {
        skipped.push_back({{"t", t}, {"reason", e.what()}});
      }
    }
  }
  for (double x : cfg.tail_x()) {
    try {
      out.csv("quadrature/tail_x" + tag(x) + ".csv", tail_curve(table, x));
    } catch (const ContractViolation& e) {
      skipped.push_back({{"x", x}, {"reason", e.what()}});
    }
  }
  return skipped;
}

int simulate_with(const ExperimentConfig& cfg, const RunOptions& opts, Mode mode,
                  const std::string& command) {
  const auto start = Clock::now();
  OutputDir out(cfg.output);
  nlohmann::json extra{{"threads", opts.threads}};
  if (mode != Mode::quadrature) {
    const auto t0 = Clock::now();
    const auto hist = simulate_counts(cfg.simulation(), opts.threads);
    write_mc(cfg, hist, out);
    extra["mc"] = {{"seed", cfg.seed}, {"n_traj", cfg.n_traj}, {"wall_seconds", seconds_since(t0)}};
  }
  if (mode != Mode::mc) {
    const auto t0 = Clock::now();
    const auto rb = resolve_bounds(cfg.dist, cfg.bounds);
    const auto table = build_table(cfg, bounds_ptr(rb), opts.threads);
    const auto skipped = write_quadrature(cfg, table, bounds_ptr(rb), out);
    extra["quadrature"] = {{"k_max", table.k_max()},
                           {"bounds", bounds_json(rb)},
                           {"skipped", skipped},
                           {"wall_seconds", seconds_since(t0)}};
  }
  extra["wall_seconds"] = seconds_since(start);
  out.json("metadata.json", metadata(cfg, command, out, extra));
  return kOk;
}

struct FitInput {
  std::string engine;
  CurveSeries tail;  // P[N_t < x t]
};

void write_fit(const ExperimentConfig& cfg, const FitInput& in, double x, OutputDir& out,
               nlohmann::json& summary) {
  FitWindow window{0.0, 1e300};
  if (!cfg.fit.t_min || !cfg.fit.t_max) window = default_fit_window(in.tail, cfg.fit.max_rel_error);
  if (cfg.fit.t_min) window.t_min = *cfg.fit.t_min;
  if (cfg.fit.t_max) window.t_max = *cfg.fit.t_max;

  const auto logc = log_curve(in.tail);
  const auto fit = tail_fit(logc, cfg.dist, window.t_min, window.t_max);
  nlohmann::json j{{"engine", in.engine}, {"x", x}, {"fit", fit.to_json()}};
  j["window"] = {{"t_min", window.t_min}, {"t_max", window.t_max}};
  try {
    const auto free = tail_fit_free(logc, cfg.dist, window.t_min, window.t_max);
    j["extension_free_log_t"] = {{"a", free.a}, {"c", free.c}, {"b", free.b},
                                 {"residual", free.residual}, {"n_points", free.n_points}};
  } catch (const InsufficientData& e) {
    j["extension_free_log_t"] = {{"error", e.what()}};
  }

  std::ostringstream csv;
  csv << "t,log_p,stderr,fit,log_m0,in_window\n";
  for (const auto& p : logc.points) {
    const double log_m0 = std::log(cfg.dist.survival(p.x));
    const bool inside = p.x >= window.t_min && p.x <= window.t_max;
    csv << format_double(p.x) << ',' << format_double(p.value) << ','
        << (p.std_error ? format_double(*p.std_error) : std::string()) << ','
        << format_double(fit.a * log_m0 + std::log(p.x) + fit.b) << ',' << format_double(log_m0)
        << ',' << (inside ? 1 : 0) << '\n';
  }
  const std::string stem = "fit_" + in.engine + "_x" + tag(x);
  out.json(stem + ".json", j);
  out.text(stem + ".csv", csv.str());
  summary.push_back(j);
}

}  // namespace

ExperimentConfig apply_options(ExperimentConfig cfg, const RunOptions& opts) {
  if (opts.out) cfg.output = *opts.out;
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
  return simulate_with(cfg, opts, cfg.mode, "simulate");
}

int cmd_quadrature(const ExperimentConfig& cfg, const RunOptions& opts) {
  return simulate_with(cfg, opts, Mode::quadrature, "quadrature");
}

int cmd_verify(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const auto settings = VerifySettings::from_json(cfg.verify);
  OutputDir out(cfg.output);
  const auto report = run_verification(cfg.dist, settings, cfg.bounds, opts.threads);
  out.json("report.json", report.to_json(cfg.dist));
  out.json("metadata.json",
           metadata(cfg, "verify", out, {{"threads", opts.threads},
                                         {"all_passed", report.all_passed()},
                                         {"wall_seconds", seconds_since(start)}}));
  for (const auto& c : report.checks) {
    const char* status = c.status == CheckResult::Status::pass   ? "pass"
                         : c.status == CheckResult::Status::fail ? "FAIL"
                                                                 : "skipped";
    std::cout << c.name << ": " << status;
    if (c.status != CheckResult::Status::skipped) {
      std::cout << " (" << c.points << " points, worst margin " << c.worst_margin << ")";
    }
    if (!c.reason.empty()) std::cout << " - " << c.reason;
    std::cout << '\n';
  }
  return report.all_passed() ? kOk : kVerificationFailed;
}

int cmd_fit(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  OutputDir out(cfg.output);
  nlohmann::json summary = nlohmann::json::array();
  const auto xs = cfg.tail_x();

  if (cfg.fit.tail_csv) {
    const auto tail = read_curve_csv_file(*cfg.fit.tail_csv);
    write_fit(cfg, {"csv", tail}, xs.front(), out, summary);
  } else {
    if (cfg.mode != Mode::quadrature) {
      const auto hist = simulate_counts(cfg.simulation(), opts.threads);
      for (double x : xs) write_fit(cfg, {"mc", tail_curve(hist, x)}, x, out, summary);
    }
    if (cfg.mode != Mode::mc) {
      const auto rb = resolve_bounds(cfg.dist, cfg.bounds);
      const auto table = build_table(cfg, bounds_ptr(rb), opts.threads, false);
      for (double x : xs) write_fit(cfg, {"quadrature", tail_curve(table, x)}, x, out, summary);
    }
  }
  out.json("metadata.json", metadata(cfg, "fit", out,
                                     {{"threads", opts.threads},
                                      {"fits", summary},
                                      {"wall_seconds", seconds_since(start)}}));
  for (const auto& f : summary) {
    std::cout << f["engine"].get<std::string>() << " x=" << f["x"].get<double>()
              << ": a=" << f["fit"]["a"].get<double>() << " b=" << f["fit"]["b"].get<double>()
              << '\n';
  }
  return kOk;
}

int run_command(const std::string& command, const std::filesystem::path& config,
                const RunOptions& opts) {
  try {
    const auto cfg = apply_options(ExperimentConfig::load(config), opts);
    if (command == "simulate") return cmd_simulate(cfg, opts);
    if (command == "quadrature") return cmd_quadrature(cfg, opts);
    if (command == "verify") return cmd_verify(cfg, opts);
    if (command == "fit") return cmd_fit(cfg, opts);
    std::cerr << "renewal-ld: unknown command '" << command << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "renewal-ld: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "renewal-ld: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "renewal-ld: I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const InsufficientData& e) {
    std::cerr << "renewal-ld: insufficient data: " << e.what() << '\n';
    return kInsufficientData;
  } catch (const std::exception& e) {
    std::cerr << "renewal-ld: error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace renewal_ld::cli
