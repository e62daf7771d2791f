#include "renewal_ld/mc_engine.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "renewal_ld/errors.hpp"
#include "renewal_ld/parallel.hpp"
#include "renewal_ld/rng.hpp"

namespace renewal_ld {

void SimulationConfig::validate() const {
  if (n_traj < 1) throw ContractViolation("SimulationConfig: n_traj >= 1");
  if (batch_size < 1) throw ContractViolation("SimulationConfig: batch_size >= 1");
}

SimulationConfig SimulationConfig::from_json(const nlohmann::json& j) {
  try {
    SimulationConfig cfg{WaitingDistribution::from_json(j.at("dist")),
                         TimeGrid::from_json(j.at("grid")),
                         j.value("n_traj", std::uint64_t{1000000}),
                         j.value("seed", std::uint64_t{1}),
                         j.value("batch_size", std::uint64_t{10000})};
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulation config: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("simulation config: ") + e.what());
  }
}

nlohmann::json SimulationConfig::to_json() const {
  return {{"dist", dist.to_json()},
          {"grid", grid.to_json()},
          {"n_traj", n_traj},
          {"seed", seed},
          {"batch_size", batch_size}};
}

CountHistogram::CountHistogram(TimeGrid grid, std::uint64_t n_traj)
    : grid_(std::move(grid)), n_traj_(n_traj), counts_(grid_.size()) {}

std::uint64_t CountHistogram::count(std::size_t t_index, std::size_t k) const {
  const auto& row = counts_.at(t_index);
  return k < row.size() ? row[k] : 0;
}

void CountHistogram::add(std::size_t t_index, std::size_t k, std::uint64_t n) {
  auto& row = counts_[t_index];
  if (k >= row.size()) row.resize(k + 1, 0);
  row[k] += n;
}

void CountHistogram::merge_counts(const CountHistogram& other) {
  if (other.grid_.size() != grid_.size()) throw ContractViolation("merge_counts: grid mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const auto& src = other.counts_[i];
    for (std::size_t k = 0; k < src.size(); ++k) {
      if (src[k] != 0) add(i, k, src[k]);
    }
  }
}

CountHistogram simulate_counts(const SimulationConfig& cfg, std::size_t threads) {
  cfg.validate();
  if (threads == 0) threads = default_threads();
  const std::uint64_t batches = (cfg.n_traj + cfg.batch_size - 1) / cfg.batch_size;
  threads = static_cast<std::size_t>(std::min<std::uint64_t>(threads, batches));
  const auto times = cfg.grid.times();
  const std::size_t G = times.size();

  std::vector<CountHistogram> local(threads, CountHistogram(cfg.grid, cfg.n_traj));
  std::visit(
      [&](const auto& law) {
        parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b, std::size_t w) {
          auto& hist = local[w];
          std::vector<std::size_t> n_at(G);
          const std::uint64_t first = b * cfg.batch_size;
          const std::uint64_t last = std::min(cfg.n_traj, first + cfg.batch_size);
          for (std::uint64_t j = first; j < last; ++j) {
            UniformStream stream(cfg.seed, j);
            double renewal = 0.0;  // S_n
            std::size_t n = 0;
            std::size_t idx = 0;
            while (idx < G) {
              const double next = renewal + quantile(law, stream.next());
              while (idx < G && times[idx] < next) n_at[idx++] = n;
              ++n;
              renewal = next;
            }
            for (std::size_t i = 0; i < G; ++i) hist.add(i, n_at[i]);
          }
        });
      },
      cfg.dist.params());

  // Integer addition is exact, so the merged counts do not depend on how
  // batches were distributed over workers.
  CountHistogram merged(cfg.grid, cfg.n_traj);
  for (const auto& h : local) merged.merge_counts(h);
  return merged;
}

std::vector<PmfPoint> estimate_pmf(const CountHistogram& hist, std::size_t t_index) {
  const auto row = hist.counts(t_index);
  const double n = static_cast<double>(hist.n_traj());
  std::vector<PmfPoint> out;
  out.reserve(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    const double p = static_cast<double>(row[k]) / n;
    out.push_back({k, {p, std::sqrt(p * (1.0 - p) / n), hist.n_traj()}});
  }
  return out;
}

MgfEstimate estimate_mgf(const CountHistogram& hist, std::size_t t_index, double h) {
  const auto row = hist.counts(t_index);
  const double n = static_cast<double>(hist.n_traj());
  double sum = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] != 0) sum += static_cast<double>(row[k]) * std::exp(h * static_cast<double>(k));
  }
  const double mean = sum / n;
  double sq = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] == 0) continue;
    const double dev = std::exp(h * static_cast<double>(k)) - mean;
    sq += static_cast<double>(row[k]) * dev * dev;
  }
  const double sd = hist.n_traj() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  return {{mean, sd / std::sqrt(n), hist.n_traj()}, h >= 0.0};
}

TailEstimate estimate_tail(const CountHistogram& hist, std::size_t t_index, double x) {
  if (!(x > 0.0)) throw ContractViolation("estimate_tail: x > 0");
  const auto row = hist.counts(t_index);
  const double limit = x * hist.grid()[t_index];
  std::uint64_t below = 0;
  for (std::size_t k = 0; k < row.size() && static_cast<double>(k) < limit; ++k) below += row[k];
  const double n = static_cast<double>(hist.n_traj());
  const double p = static_cast<double>(below) / n;
  return {{p, std::sqrt(p * (1.0 - p) / n), hist.n_traj()}, below == 0};
}

}  // namespace renewal_ld
