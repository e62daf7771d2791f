#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pipeline.hpp"
#include "renewal_ld/errors.hpp"
#include "renewal_ld/occupation.hpp"
#include "renewal_ld/time_grid.hpp"

namespace renewal_ld::cli {
namespace {

constexpr double kSeriesRel = 1e-6;

AxisSpec axis_from_json(const nlohmann::json& j, const char* name, AxisSpec fallback) {
  if (!j.contains(name)) return fallback;
  const auto& a = j.at(name);
  AxisSpec s = fallback;
  s.min = a.value("min", s.min);
  s.max = a.value("max", s.max);
  s.points = a.value("points", s.points);
  if (!(s.max >= s.min) || s.points < 1) {
    throw ConfigError(std::string("verify.") + name + ": need min <= max and points >= 1");
  }
  return s;
}

nlohmann::json axis_json(const AxisSpec& a, bool logarithmic) {
  return {{"min", a.min}, {"max", a.max}, {"points", a.points},
          {"spacing", logarithmic ? "log" : "linear"}};
}

// Keeps the most negative margin seen by a check.
class Tracker {
 public:
  explicit Tracker(std::string name) { r_.name = std::move(name); }
  void observe(double margin, const nlohmann::json& where) {
    ++r_.points;
    if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
    if (first_ || margin < r_.worst_margin) {
      r_.worst_margin = margin;
      r_.worst_at = where;
      first_ = false;
    }
  }
  CheckResult finish() {
    r_.status = (r_.points > 0 && r_.worst_margin >= 0.0) ? CheckResult::Status::pass
                                                          : CheckResult::Status::fail;
    return r_;
  }

 private:
  CheckResult r_;
  bool first_ = true;
};

double relative_margin(double bound, double value) {
  if (bound > 0.0) return (bound - value) / bound;
  return value <= bound ? 0.0 : -std::numeric_limits<double>::infinity();
}

CheckResult skipped(const std::string& name, const std::string& reason) {
  CheckResult r;
  r.name = name;
  r.status = CheckResult::Status::skipped;
  r.reason = reason;
  return r;
}

CheckResult failed(const std::string& name, const std::string& reason) {
  CheckResult r;
  r.name = name;
  r.status = CheckResult::Status::fail;
  r.worst_margin = -std::numeric_limits<double>::infinity();
  r.reason = reason;
  return r;
}

}  // namespace

std::vector<double> AxisSpec::values(bool logarithmic) const {
  if (points == 1 || min == max) return {min};
  return logarithmic ? logspace(min, max, points) : linspace(min, max, points);
}

VerifySettings VerifySettings::from_json(const nlohmann::json& j) {
  VerifySettings s;
  if (!j.is_object()) throw ConfigError("verify block must be an object");
  try {
    if (j.contains("checks")) {
      s.checks = j.at("checks").get<std::vector<std::string>>();
      for (const auto& c : *s.checks) {
        const auto& all = all_check_names();
        if (std::find(all.begin(), all.end(), c) == all.end()) {
          throw ConfigError("verify: unknown check '" + c + "'");
        }
      }
    }
    s.d = axis_from_json(j, "d", s.d);
    s.t = axis_from_json(j, "t", s.t);
    s.h = axis_from_json(j, "h", s.h);
    if (s.d.min < 1.0) throw ConfigError("verify.d: d >= 1 required");
    if (s.t.min <= 0.0) throw ConfigError("verify.t: t > 0 required");
    if (s.h.max >= 0.0) throw ConfigError("verify.h: h < 0 required");
    s.n_max = j.value("n_max", s.n_max);
    s.d_factor = j.value("d_factor", s.d_factor);
    s.closed_form_tol = j.value("closed_form_tol", s.closed_form_tol);
    if (j.contains("feller")) {
      const auto& f = j.at("feller");
      s.feller_t = f.value("t", s.feller_t);
      s.feller_k_max = f.value("k_max", s.feller_k_max);
      s.feller_tol = f.value("tol", s.feller_tol);
    }
    if (j.contains("ratio")) {
      const auto& r = j.at("ratio");
      s.ratio_t = r.value("t", s.ratio_t);
      if (r.contains("h")) s.ratio_h = r.at("h").get<std::vector<double>>();
      s.ratio_tol = r.value("tol", s.ratio_tol);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("verify: ") + e.what());
  }
  if (s.n_max < 1 || s.feller_k_max < 1 || !(s.d_factor > 1.0)) {
    throw ConfigError("verify: n_max >= 1, feller.k_max >= 1 and d_factor > 1 required");
  }
  for (double h : s.ratio_h) {
    if (!(h < 0.0)) throw ConfigError("verify.ratio.h: values must be < 0");
  }
  return s;
}

nlohmann::json VerifySettings::to_json() const {
  nlohmann::json j{{"d", axis_json(d, true)},
                   {"t", axis_json(t, true)},
                   {"h", axis_json(h, false)},
                   {"n_max", n_max},
                   {"d_factor", d_factor},
                   {"closed_form_tol", closed_form_tol},
                   {"feller", {{"t", feller_t}, {"k_max", feller_k_max}, {"tol", feller_tol}}},
                   {"ratio", {{"t", ratio_t}, {"h", ratio_h}, {"tol", ratio_tol}}}};
  if (checks) j["checks"] = *checks;
  return j;
}

nlohmann::json CheckResult::to_json() const {
  static const char* names[] = {"pass", "fail", "skipped"};
  nlohmann::json j{{"name", name}, {"status", names[static_cast<int>(status)]}, {"points", points}};
  if (status != Status::skipped) {
    if (std::isfinite(worst_margin)) {
      j["worst_margin"] = worst_margin;
    } else {
      j["worst_margin"] = worst_margin > 0 ? "inf" : "-inf";
    }
    j["worst_at"] = worst_at;
  }
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

bool VerifyReport::all_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckResult::Status::fail; });
}

nlohmann::json VerifyReport::to_json(const WaitingDistribution& dist) const {
  nlohmann::json j{{"dist", dist.to_json()}, {"constants", constants}, {"grid", grid}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(c.to_json());
  j["all_passed"] = all_passed();
  return j;
}

const std::vector<std::string>& all_check_names() {
  static const std::vector<std::string> names = {"lemma1", "prop1",  "occupation", "thm2",
                                                 "closed_form", "feller", "ratio"};
  return names;
}

bool is_bound_check(const std::string& name) {
  return name == "lemma1" || name == "prop1" || name == "occupation" || name == "thm2" ||
         name == "closed_form";
}

VerifyReport run_verification(const WaitingDistribution& dist, const VerifySettings& settings,
                              const BoundOverrides& overrides, std::size_t threads) {
  const auto m_int = dist.integer_pareto_exponent();
  const bool pareto = dist.family() == Family::pareto;
  std::vector<std::string> enabled;
  if (settings.checks) {
    enabled = *settings.checks;
    for (const auto& c : enabled) {
      if (is_bound_check(c) && !m_int) {
        throw ConfigError("verify: check '" + c +
                          "' needs a Pareto law with integer exponent m >= 3; got " +
                          dist.describe());
      }
    }
  } else {
    enabled = all_check_names();
  }
  const auto wants = [&](const std::string& c) {
    return std::find(enabled.begin(), enabled.end(), c) != enabled.end();
  };

  VerifyReport report;
  report.grid = settings.to_json();

  ResolvedBounds rb;
  std::optional<std::string> invalid_constants;
  if (m_int) {
    rb = resolve_bounds(dist, overrides);
    const auto& bc = *rb.constants;
    report.constants = {{"m", bc.m}, {"cbar", bc.cbar}, {"Cm", bc.Cm}, {"source", rb.note}};
    if (rb.estimated) {
      report.constants["cbar_raw"] = rb.estimated->cbar_raw;
      report.constants["cbar_grid"] = rb.estimated->cbar_grid;
      report.constants["cbar_limit"] = rb.estimated->cbar_limit;
      report.constants["Cm_raw"] = rb.estimated->Cm_raw;
      report.constants["safety"] = rb.estimated->safety;
    }
    try {
      bc.validate();
    } catch (const ContractViolation& e) {
      invalid_constants = e.what();
    }
  } else {
    report.constants = {{"note", "no uniform bound constants for " + dist.describe()}};
  }
  const BoundConstants* series_bounds =
      (rb.constants && !invalid_constants) ? &*rb.constants : nullptr;

  const auto d_values = settings.d.values(true);
  const auto t_values = settings.t.values(true);
  const auto h_values = settings.h.values(false);

  const bool need_table = wants("prop1") || wants("occupation") || wants("thm2") ||
                          wants("closed_form") || (wants("feller") && pareto) || wants("ratio");
  std::optional<OccupationTable> table;
  if (need_table) {
    std::vector<double> extra(t_values.begin(), t_values.end());
    extra.push_back(settings.feller_t);
    extra.push_back(settings.ratio_t);
    const TimeGrid grid = quadrature_grid(TimeGrid::from_points({}), extra);

    std::size_t k = static_cast<std::size_t>(std::max(settings.n_max, settings.feller_k_max));
    const auto grow = [&](double h, double t) {
      const double tol = kSeriesRel * 0.5 * dist.survival(t);
      if (tol > 0.0) k = std::max(k, required_k_max(h, t, tol, series_bounds, k));
    };
    if (wants("thm2") && m_int) {
      for (double h : h_values) {
        for (double t : t_values) grow(h, t);
      }
    }
    if (wants("ratio")) {
      for (double h : settings.ratio_h) grow(h, settings.ratio_t);
    }
    table = occupation_table(dist, grid, k, quadrature_options(threads));
  }
  const auto idx = [&](double t) { return *table->grid().index_of(t, 1e-12); };

  for (const auto& name : all_check_names()) {
    if (!wants(name)) continue;
    if (is_bound_check(name) && !m_int) {
      report.checks.push_back(skipped(
          name, "bound checks need a Pareto law with integer exponent m >= 3; got " +
                    dist.describe()));
      continue;
    }
    if (name == "lemma1") {
      Tracker tr(name);
      const int m = rb.constants->m;
      const double cbar = rb.constants->cbar;
      if (!(cbar >= 0.0)) {
        report.checks.push_back(failed(name, "cbar must be >= 0"));
        continue;
      }
      for (double d : d_values) {
        for (double t : t_values) {
          const auto r = lemma1_check(m, d, t, cbar);
          tr.observe(relative_margin(r.rhs, r.lhs), {{"d", d}, {"t", t}, {"lhs", r.lhs}, {"rhs", r.rhs}});
        }
      }
      report.checks.push_back(tr.finish());
    } else if (name == "prop1" || name == "occupation") {
      if (invalid_constants) {
        report.checks.push_back(failed(name, "invalid constants: " + *invalid_constants));
        continue;
      }
      Tracker tr(name);
      for (double d : d_values) {
        BoundConstants bc = *rb.constants;
        bc.d = d;
        for (double t : t_values) {
          const std::size_t i = idx(t);
          const double m0 = dist.survival(t);
          for (int n = 1; n <= settings.n_max; ++n) {
            const double mn = table->prob(static_cast<std::size_t>(n), i);
            double value;
            double bound;
            if (name == "prop1") {
              value = mn - table->prob(static_cast<std::size_t>(n - 1), i);
              bound = prop1_bound(bc, n, t);
            } else {
              value = mn;
              bound = occupation_bound(bc, n, t, m0);
            }
            tr.observe(relative_margin(bound, value),
                       {{"d", d}, {"t", t}, {"n", n}, {"value", value}, {"bound", bound}});
          }
        }
      }
      report.checks.push_back(tr.finish());
    } else if (name == "thm2") {
      if (invalid_constants) {
        report.checks.push_back(failed(name, "invalid constants: " + *invalid_constants));
        continue;
      }
      Tracker tr(name);
      for (double h : h_values) {
        BoundConstants bc = *rb.constants;
        bc.d = std::max(1.0, settings.d_factor * min_admissible_d(bc.cbar, h));
        for (double t : t_values) {
          const std::size_t i = idx(t);
          const auto s = mgf_series(*table, h, i, series_bounds, 10.0 * kSeriesRel);
          const double value = s.value + s.truncation_bound;
          const double bound = thm2_bound(bc, h, t, dist.survival(t));
          tr.observe(relative_margin(bound, value),
                     {{"h", h}, {"t", t}, {"d", bc.d}, {"value", value}, {"bound", bound}});
        }
      }
      report.checks.push_back(tr.finish());
    } else if (name == "closed_form") {
      Tracker tr(name);
      const int m = rb.constants->m;
      for (double t : t_values) {
        const double err = std::abs(table->prob(1, idx(t)) - m1_closed_form(m, t));
        tr.observe((settings.closed_form_tol - err) / settings.closed_form_tol,
                   {{"t", t}, {"abs_error", err}});
      }
      report.checks.push_back(tr.finish());
    } else if (name == "feller") {
      if (!pareto) {
        report.checks.push_back(
            skipped(name, "the Feller ratio target k needs a Pareto tail; got " + dist.describe()));
        continue;
      }
      Tracker tr(name);
      const double m = std::get<Pareto>(dist.params()).m;
      const std::size_t i = idx(settings.feller_t);
      for (int k = 1; k <= settings.feller_k_max; ++k) {
        const double r = feller_ratio(m, k, settings.feller_t,
                                      tail_prob_Sk(*table, static_cast<std::size_t>(k), i));
        const double dev = std::abs(r / k - 1.0);
        tr.observe((settings.feller_tol - dev) / settings.feller_tol,
                   {{"k", k}, {"t", settings.feller_t}, {"ratio", r}});
      }
      report.checks.push_back(tr.finish());
    } else if (name == "ratio") {
      Tracker tr(name);
      const std::size_t i = idx(settings.ratio_t);
      const double m0 = dist.survival(settings.ratio_t);
      for (double h : settings.ratio_h) {
        const double M = mgf_series(*table, h, i, series_bounds, 10.0 * kSeriesRel).value;
        const double limit = 1.0 / (1.0 - std::exp(h));
        const double dev = std::abs(M / m0 / limit - 1.0);
        tr.observe((settings.ratio_tol - dev) / settings.ratio_tol,
                   {{"h", h}, {"t", settings.ratio_t}, {"ratio", M / m0}, {"limit", limit}});
      }
      report.checks.push_back(tr.finish());
    }
  }
  return report;
}

}  // namespace renewal_ld::cli
