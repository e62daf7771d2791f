#include "renewal_ld/time_grid.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "renewal_ld/errors.hpp"

namespace renewal_ld {

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw ContractViolation("logspace: requires 0 < lo < hi and n >= 2");
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  std::vector<double> out(n);
  const auto last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / last);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw ContractViolation("linspace: requires hi > lo and n >= 2");
  std::vector<double> out(n);
  const auto last = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / last;
  }
  out.back() = hi;
  return out;
}

TimeGrid::TimeGrid(std::vector<double> times, GridStyle style)
    : times_(std::move(times)), style_(style) {
  if (times_.empty() || times_.front() != 0.0) {
    throw ContractViolation("TimeGrid: first node must be 0");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw ContractViolation("TimeGrid: non-finite node");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw ContractViolation("TimeGrid: nodes must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double t_max, std::size_t points) {
  if (!(t_max > 0.0) || points < 1) {
    throw ContractViolation("uniform grid: requires t_max > 0 and points >= 1");
  }
  std::vector<double> t(points + 1);
  for (std::size_t i = 0; i <= points; ++i) {
    t[i] = t_max * static_cast<double>(i) / static_cast<double>(points);
  }
  t.back() = t_max;
  return TimeGrid(std::move(t), GridStyle::uniform);
}

TimeGrid TimeGrid::logarithmic(double t_min, double t_max, std::size_t points) {
  std::vector<double> t{0.0};
  if (points == 1) {
    if (!(t_min > 0.0)) throw ContractViolation("log grid: t_min must be positive");
    t.push_back(t_min);
  } else {
    const auto pos = logspace(t_min, t_max, points);
    t.insert(t.end(), pos.begin(), pos.end());
  }
  return TimeGrid(std::move(t), GridStyle::logarithmic);
}

TimeGrid TimeGrid::per_decade(double t_min, double t_max, std::size_t per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min) || per_decade < 1) {
    throw ContractViolation("per_decade grid: requires 0 < t_min < t_max");
  }
  const double decades = std::log10(t_max / t_min);
  const auto n = static_cast<std::size_t>(std::ceil(decades * static_cast<double>(per_decade) - 1e-9)) + 1;
  return logarithmic(t_min, t_max, std::max<std::size_t>(n, 2));
}

TimeGrid TimeGrid::from_points(std::vector<double> times) {
  if (times.empty() || times.front() != 0.0) times.insert(times.begin(), 0.0);
  return TimeGrid(std::move(times), GridStyle::custom);
}

TimeGrid TimeGrid::from_json(const nlohmann::json& j) {
  try {
    if (j.contains("times")) {
      return from_points(j.at("times").get<std::vector<double>>());
    }
    const auto style = j.value("style", std::string("log"));
    const auto points = j.at("points").get<std::size_t>();
    const auto t_max = j.at("t_max").get<double>();
    if (style == "log" || style == "logarithmic") {
      return logarithmic(j.at("t_min").get<double>(), t_max, points);
    }
    if (style == "uniform") return uniform(t_max, points);
    throw ConfigError("grid: unknown style '" + style + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

nlohmann::json TimeGrid::to_json() const {
  nlohmann::json j;
  switch (style_) {
    case GridStyle::uniform:
      j = {{"style", "uniform"}, {"t_max", t_max()}, {"points", size() - 1}};
      break;
    case GridStyle::logarithmic:
      j = {{"style", "log"}, {"t_min", times_.size() > 1 ? times_[1] : 0.0},
           {"t_max", t_max()}, {"points", size() - 1}};
      break;
    case GridStyle::custom:
      j = {{"times", times_}};
      break;
  }
  return j;
}

TimeGrid TimeGrid::merged_with(std::span<const double> extra, double rel_tol) const {
  std::vector<double> out;
  std::vector<double> add(extra.begin(), extra.end());
  std::sort(add.begin(), add.end());
  for (double t : times_) {
    const bool shadowed = std::any_of(add.begin(), add.end(), [&](double e) {
      return std::abs(e - t) <= rel_tol * std::max(std::abs(e), std::abs(t));
    });
    if (!shadowed) out.push_back(t);
  }
  for (double e : add) {
    if (e < 0.0 || !std::isfinite(e)) throw ContractViolation("merged_with: invalid time");
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return from_points(std::move(out));
}

std::optional<std::size_t> TimeGrid::index_of(double t, double rel_tol) const {
  const std::size_t i = nearest_index(t);
  const double tol = rel_tol * std::max(std::abs(t), 1e-300);
  if (std::abs(times_[i] - t) <= tol || times_[i] == t) return i;
  return std::nullopt;
}

std::size_t TimeGrid::nearest_index(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 0;
  if (it == times_.end()) return times_.size() - 1;
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  return (t - times_[hi - 1] <= times_[hi] - t) ? hi - 1 : hi;
}

}  // namespace renewal_ld
