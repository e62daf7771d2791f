#include "renewal_ld/distribution.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <nlohmann/json.hpp>

#include "renewal_ld/errors.hpp"

namespace renewal_ld {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Standardised log-time for the log-normal family.
double lognormal_argument(const LogNormal& d, double t) {
  return (std::log(t) - d.mu) / (std::numbers::sqrt2 * d.sigma);
}

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("distribution: missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

double quantile(const LogNormal& d, double u) {
  const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  return std::exp(d.mu + d.sigma * z);
}

WaitingDistribution WaitingDistribution::pareto(double m) {
  if (!(m > 2.0) || !std::isfinite(m)) {
    throw ContractViolation("Pareto requires finite m > 2");
  }
  return WaitingDistribution(Pareto{m});
}

WaitingDistribution WaitingDistribution::inverse_rayleigh(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ContractViolation("inverse Rayleigh requires beta > 0");
  }
  return WaitingDistribution(InverseRayleigh{beta});
}

WaitingDistribution WaitingDistribution::lognormal(double mu, double sigma) {
  if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ContractViolation("log-normal requires finite mu and sigma > 0");
  }
  return WaitingDistribution(LogNormal{mu, sigma});
}

WaitingDistribution WaitingDistribution::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError("distribution: expected an object with a 'family' string");
  }
  const auto family = j.at("family").get<std::string>();
  try {
    if (family == "pareto") return pareto(require_number(j, "m"));
    if (family == "inv_rayleigh") return inverse_rayleigh(require_number(j, "beta"));
    if (family == "lognormal") {
      return lognormal(require_number(j, "mu"), require_number(j, "sigma"));
    }
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
  throw ConfigError("distribution: unknown family '" + family + "'");
}

WaitingDistribution WaitingDistribution::parse(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json WaitingDistribution::to_json() const {
  return std::visit(
      overloaded{
          [](const Pareto& d) { return nlohmann::json{{"family", "pareto"}, {"m", d.m}}; },
          [](const InverseRayleigh& d) {
            return nlohmann::json{{"family", "inv_rayleigh"}, {"beta", d.beta}};
          },
          [](const LogNormal& d) {
            return nlohmann::json{{"family", "lognormal"}, {"mu", d.mu}, {"sigma", d.sigma}};
          },
      },
      params_);
}

Family WaitingDistribution::family() const noexcept {
  return std::visit(overloaded{
                        [](const Pareto&) { return Family::pareto; },
                        [](const InverseRayleigh&) { return Family::inverse_rayleigh; },
                        [](const LogNormal&) { return Family::lognormal; },
                    },
                    params_);
}

std::string WaitingDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Pareto& d) { os << "pareto(m=" << d.m << ")"; },
                 [&](const InverseRayleigh& d) { os << "inv_rayleigh(beta=" << d.beta << ")"; },
                 [&](const LogNormal& d) {
                   os << "lognormal(mu=" << d.mu << ",sigma=" << d.sigma << ")";
                 },
             },
             params_);
  return os.str();
}

double WaitingDistribution::pdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  return std::visit(
      overloaded{
          [t](const Pareto& d) { return (d.m - 1.0) * std::exp(-d.m * std::log1p(t)); },
          [t](const InverseRayleigh& d) {
            return std::exp(std::log(d.beta) - 3.0 * std::log(t) - d.beta / (2.0 * t * t));
          },
          [t](const LogNormal& d) {
            const double z = (std::log(t) - d.mu) / d.sigma;
            return std::exp(-0.5 * z * z) /
                   (std::sqrt(2.0 * std::numbers::pi) * d.sigma * t);
          },
      },
      params_);
}

double WaitingDistribution::cdf(double t) const {
  if (!(t > 0.0)) return 0.0;
  return std::visit(
      overloaded{
          [t](const Pareto& d) { return -std::expm1(-(d.m - 1.0) * std::log1p(t)); },
          [t](const InverseRayleigh& d) { return std::exp(-d.beta / (2.0 * t * t)); },
          [t](const LogNormal& d) { return 0.5 * std::erfc(-lognormal_argument(d, t)); },
      },
      params_);
}

double WaitingDistribution::survival(double t) const {
  if (!(t > 0.0)) return 1.0;
  return std::visit(
      overloaded{
          [t](const Pareto& d) { return std::exp(-(d.m - 1.0) * std::log1p(t)); },
          [t](const InverseRayleigh& d) { return -std::expm1(-d.beta / (2.0 * t * t)); },
          [t](const LogNormal& d) { return 0.5 * std::erfc(lognormal_argument(d, t)); },
      },
      params_);
}

double WaitingDistribution::sample(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw ContractViolation("sample: uniform variate must lie in (0,1)");
  }
  return std::visit([u](const auto& d) { return quantile(d, u); }, params_);
}

double WaitingDistribution::mean() const {
  return std::visit(
      overloaded{
          [](const Pareto& d) { return 1.0 / (d.m - 2.0); },
          [](const InverseRayleigh& d) { return std::sqrt(std::numbers::pi * d.beta / 2.0); },
          [](const LogNormal& d) { return std::exp(d.mu + 0.5 * d.sigma * d.sigma); },
      },
      params_);
}

std::optional<int> WaitingDistribution::integer_pareto_exponent() const {
  if (const auto* p = std::get_if<Pareto>(&params_)) {
    const double r = std::round(p->m);
    if (r == p->m && r >= 3.0) return static_cast<int>(r);
  }
  return std::nullopt;
}

}  // namespace renewal_ld
