#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "experiment.hpp"
#include "renewal_ld/bounds.hpp"

namespace renewal_ld::cli {

struct AxisSpec {
  double min;
  double max;
  std::size_t points;
  std::vector<double> values(bool logarithmic) const;
};

/// `verify` block of an experiment config. Unset `checks` selects every
/// check applicable to the law; naming a bound check for a law without an
/// integer Pareto exponent is a ConfigError.
struct VerifySettings {
  std::optional<std::vector<std::string>> checks;
  AxisSpec d{1.05, 950.0, 100};
  AxisSpec t{1.1e-2, 9e3, 100};
  AxisSpec h{-3.0, -0.1, 100};
  int n_max = 50;
  double d_factor = 2.0;  // thm2 check uses d = max(1, d_factor * d_min(h))
  double closed_form_tol = 1e-8;
  double feller_t = 1000.0;
  int feller_k_max = 5;
  double feller_tol = 0.05;
  double ratio_t = 1000.0;
  std::vector<double> ratio_h{-0.5, -1.0, -2.0};
  double ratio_tol = 0.02;

  static VerifySettings from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CheckResult {
  std::string name;
  enum class Status { pass, fail, skipped } status = Status::pass;
  std::size_t points = 0;
  double worst_margin = 0.0;  // relative margin; negative means violated
  nlohmann::json worst_at = nlohmann::json::object();
  std::string reason;

  nlohmann::json to_json() const;
};

struct VerifyReport {
  nlohmann::json constants;
  nlohmann::json grid;
  std::vector<CheckResult> checks;
  bool all_passed() const;
  nlohmann::json to_json(const WaitingDistribution& dist) const;
};

/// Names of all known checks, bound checks first.
const std::vector<std::string>& all_check_names();
bool is_bound_check(const std::string& name);

VerifyReport run_verification(const WaitingDistribution& dist, const VerifySettings& settings,
                              const BoundOverrides& overrides, std::size_t threads);

}  // namespace renewal_ld::cli
