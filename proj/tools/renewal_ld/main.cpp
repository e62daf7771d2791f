#include <algorithm>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Renewal-process large deviations: simulation, quadrature, bounds, fits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RENEWAL_LD_VERSION);

  std::string config;
  std::string out;
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Run the engines selected by the config mode"},
      {"quadrature", "Compute occupation probabilities by quadrature"},
      {"verify", "Check the uniform bounds and finite-t limits"},
      {"fit", "Fit the tail ansatz to P[N_t < x t]"}};
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> out_opts;
  std::vector<CLI::Option*> seed_opts;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    out_opts.push_back(sub->add_option("--out", out, "Output directory (overrides config)"));
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    seed_opts.push_back(sub->add_option("--seed", seed, "RNG seed (overrides config)"));
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : renewal_ld::cli::kConfigError;
  }

  renewal_ld::cli::RunOptions opts;
  opts.threads = threads;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    if (out_opts[i]->count()) opts.out = out;
    if (seed_opts[i]->count()) opts.seed = seed;
    return renewal_ld::cli::run_command(subs[i]->get_name(), config, opts);
  }
  return renewal_ld::cli::kConfigError;
}
