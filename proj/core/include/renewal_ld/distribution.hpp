#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

namespace renewal_ld {

// Pareto (Lomax) law shifted to start at zero: p(t) = (m-1)/(1+t)^m.
struct Pareto {
  double m;
};

// p(t) = beta/t^3 exp(-beta/(2 t^2)).
struct InverseRayleigh {
  double beta;
};

// log(tau) ~ Normal(mu, sigma^2).
struct LogNormal {
  double mu;
  double sigma;
};

// Inverse CDFs, 0 < u < 1, unchecked.
inline double quantile(const Pareto& d, double u) {
  return std::expm1(-std::log1p(-u) / (d.m - 1.0));
}
inline double quantile(const InverseRayleigh& d, double u) {
  return std::sqrt(d.beta / (-2.0 * std::log(u)));
}
/// exp(mu + sigma Z) with Z the Gaussian quantile of u.
double quantile(const LogNormal& d, double u);

enum class Family { pareto, inverse_rayleigh, lognormal };

/// Positive i.i.d. waiting time law of the renewal process. Immutable; all
/// members are pure functions of the parameters.
class WaitingDistribution {
 public:
  using Params = std::variant<Pareto, InverseRayleigh, LogNormal>;

  static WaitingDistribution pareto(double m);
  static WaitingDistribution inverse_rayleigh(double beta);
  static WaitingDistribution lognormal(double mu, double sigma);

  /// Parses `{"family":"pareto","m":3.0}`, `{"family":"inv_rayleigh","beta":1.0}`
  /// or `{"family":"lognormal","mu":0.0,"sigma":1.5}`. Throws ConfigError.
  static WaitingDistribution from_json(const nlohmann::json& j);
  static WaitingDistribution parse(const std::string& text);
  nlohmann::json to_json() const;

  Family family() const noexcept;
  const Params& params() const noexcept { return params_; }
  std::string describe() const;

  double pdf(double t) const;
  double cdf(double t) const;
  /// M0(t) = P[tau > t]; equals 1 for t <= 0.
  double survival(double t) const;
  /// Inverse CDF. Requires 0 < u < 1.
  double sample(double u) const;
  double mean() const;

  /// Tail exponent m when the law is Pareto with integer m, else nullopt.
  std::optional<int> integer_pareto_exponent() const;

 private:
  explicit WaitingDistribution(Params p) : params_(p) {}
  Params params_;
};

}  // namespace renewal_ld
