#include "experiment.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "renewal_ld/asymptotics.hpp"
#include "renewal_ld/errors.hpp"

namespace renewal_ld::cli {
namespace {

const std::set<std::string> kKnownKeys = {
    "name",   "dist",     "grid",  "mode",   "h",      "x",   "report_times", "n_traj",
    "seed",   "batch_size", "k_max", "output", "bounds", "fit", "verify"};

std::vector<double> number_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be a number or a list");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

template <class T>
T integer(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) return static_cast<T>(d);
    }
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    throw ConfigError(std::string("'") + key + "' must be non-negative");
  }
  return v.get<T>();
}

Mode parse_mode(const std::string& s) {
  if (s == "mc") return Mode::mc;
  if (s == "quadrature") return Mode::quadrature;
  if (s == "both") return Mode::both;
  throw ConfigError("mode must be one of mc, quadrature, both; got '" + s + "'");
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::mc:
      return "mc";
    case Mode::quadrature:
      return "quadrature";
    case Mode::both:
      return "both";
  }
  return "mc";
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  if (!j.contains("dist")) throw ConfigError("config: missing 'dist'");
  if (!j.contains("grid")) throw ConfigError("config: missing 'grid'");

  ExperimentConfig c;
  try {
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    c.dist = WaitingDistribution::from_json(j.at("dist"));
    c.grid_spec = j.at("grid");
    c.report_times = number_list(j, "report_times");
    for (double t : c.report_times) {
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("report_times must be finite and > 0");
    }
    c.grid = TimeGrid::from_json(c.grid_spec).merged_with(c.report_times);
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    c.h = number_list(j, "h");
    for (double h : c.h) {
      if (!std::isfinite(h)) throw ConfigError("h values must be finite");
    }
    c.x = number_list(j, "x");
    for (double x : c.x) {
      if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("x values must be finite and > 0");
    }
    c.n_traj = integer<std::uint64_t>(j, "n_traj", c.n_traj);
    c.seed = integer<std::uint64_t>(j, "seed", c.seed);
    c.batch_size = integer<std::uint64_t>(j, "batch_size", c.batch_size);
    if (j.contains("k_max")) c.k_max = integer<std::size_t>(j, "k_max", 0);
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      if (!b.is_object()) throw ConfigError("'bounds' must be an object");
      c.bounds.cbar = optional_number(b, "cbar");
      c.bounds.Cm = optional_number(b, "Cm");
      c.bounds.d = optional_number(b, "d");
    }
    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      if (!f.is_object()) throw ConfigError("'fit' must be an object");
      c.fit.t_min = optional_number(f, "t_min");
      c.fit.t_max = optional_number(f, "t_max");
      if (auto r = optional_number(f, "max_rel_error")) c.fit.max_rel_error = *r;
      if (f.contains("tail_csv")) c.fit.tail_csv = f.at("tail_csv").get<std::string>();
    }
    if (j.contains("verify")) {
      c.verify = j.at("verify");
      if (!c.verify.is_object()) throw ConfigError("'verify' must be an object");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    c.simulation().validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  if (j.is_object() && !j.contains("name")) j["name"] = path.stem().string();
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{{"name", name},
                   {"dist", dist.to_json()},
                   {"grid", grid_spec},
                   {"mode", mode_name(mode)},
                   {"h", h},
                   {"x", tail_x()},
                   {"report_times", report_times},
                   {"n_traj", n_traj},
                   {"seed", seed},
                   {"batch_size", batch_size},
                   {"output", output.string()},
                   {"verify", verify}};
  if (k_max) j["k_max"] = *k_max;
  nlohmann::json b = nlohmann::json::object();
  if (bounds.cbar) b["cbar"] = *bounds.cbar;
  if (bounds.Cm) b["Cm"] = *bounds.Cm;
  if (bounds.d) b["d"] = *bounds.d;
  if (!b.empty()) j["bounds"] = b;
  nlohmann::json f{{"max_rel_error", fit.max_rel_error}};
  if (fit.t_min) f["t_min"] = *fit.t_min;
  if (fit.t_max) f["t_max"] = *fit.t_max;
  if (fit.tail_csv) f["tail_csv"] = fit.tail_csv->string();
  j["fit"] = f;
  return j;
}

SimulationConfig ExperimentConfig::simulation() const {
  return SimulationConfig{dist, grid, n_traj, seed, batch_size};
}

std::vector<double> ExperimentConfig::tail_x() const {
  if (!x.empty()) return x;
  return {default_tail_x(dist)};
}

std::vector<double> ExperimentConfig::resolved_report_times() const {
  if (!report_times.empty()) return report_times;
  std::vector<double> out;
  for (double t : grid.times()) {
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

}  // namespace renewal_ld::cli
