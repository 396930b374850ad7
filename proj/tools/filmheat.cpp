// filmheat: linear tables, single simulations and error-map sweeps.
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "filmheat/run.hpp"

namespace {

using filmheat::IoError;
using filmheat::UsageError;

std::map<std::string, std::string> overrides_from(const std::optional<std::string>& models,
                                                  const std::optional<std::string>& reference,
                                                  const std::optional<std::string>& domain,
                                                  const std::optional<std::size_t>& samples,
                                                  const std::optional<std::uint64_t>& seed,
                                                  const std::optional<std::size_t>& workers) {
  std::map<std::string, std::string> o;
  if (models) o["solver.models"] = *models;
  if (reference) o["solver.reference"] = *reference;
  if (domain) o["domain.kind"] = *domain;
  if (samples) o["sweep.samples"] = std::to_string(*samples);
  if (seed) o["sweep.seed"] = std::to_string(*seed);
  if (workers) o["sweep.workers"] = std::to_string(*workers);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat transfer in falling liquid films: averaged models and reference solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(filmheat::version_string));

  // linear
  auto* linear = app.add_subcommand("linear", "Flat-film damping rates (units of 3 Pe lambda)");
  std::string bih_spec = "0";
  std::string k_spec = "0";
  int modes = 3;
  std::string linear_out;
  linear->add_option("--bih", bih_spec, "Bih values: v | v1,v2,... | start:stop:count[:log]");
  linear->add_option("--k", k_spec, "wavenumbers, same syntax as --bih");
  linear->add_option("--modes", modes, "number of exact modes")->check(CLI::PositiveNumber);
  linear->add_option("--out", linear_out, "output file (default: stdout)");

  // shared run options
  std::string config_path;
  std::string out_dir;
  std::optional<std::string> models;
  std::optional<std::string> reference;
  std::optional<std::string> domain;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool force = false;

  auto* simulate = app.add_subcommand("simulate", "Run one simulation into a run directory");
  auto* sweep = app.add_subcommand("sweep", "Latin-hypercube error map over (Pe, Bi); resumable");
  for (auto* sub : {simulate, sweep}) {
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out_dir, "run directory")->required();
    sub->add_option("--models", models, "comma-separated models: theta,theta-phi,scheid,lin");
    sub->add_option("--reference", reference, "run the Fourier reference (true/false)");
    sub->add_option("--domain", domain, "periodic or open")->check(CLI::IsMember({"periodic", "open"}));
    sub->add_flag("--force", force, "overwrite an existing run directory");
  }
  sweep->add_option("--samples", samples, "number of samples")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "sampler seed");
  sweep->add_option("--workers", workers, "worker threads (default: available cores)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*linear) {
      const auto bih = filmheat::parse_range(bih_spec, "--bih");
      const auto k = filmheat::parse_range(k_spec, "--k");
      const auto table = filmheat::linear_table(bih, k, modes);
      if (linear_out.empty()) {
        table.write(std::cout);
      } else {
        table.save(linear_out);
      }
      return 0;
    }
    const auto ov = overrides_from(models, reference, domain, samples, seed, workers);
    const filmheat::RunConfig cfg = filmheat::load_config(config_path, ov);
    if (*simulate) {
      const auto r = filmheat::run_simulate(cfg, out_dir, force, config_path);
      std::cout << "simulate: " << r.run.steps << " steps to t = " << r.run.t_end << ", "
                << r.snapshots << " snapshots, output in " << out_dir << "\n";
      for (const auto& rider : r.run.riders)
        std::cout << "  " << rider.name << ": min theta " << rider.min_theta << ", Nu "
                  << rider.nu_mean << ", H1 error interface " << rider.error_interface << ", wall "
                  << rider.error_wall << "\n";
      return 0;
    }
    if (*sweep) {
      const auto r = filmheat::run_sweep(cfg, out_dir, force, config_path, workers.value_or(0));
      std::cout << "sweep: " << r.computed << " samples computed, " << r.skipped
                << " resumed, " << r.failed << " failed; error map in " << out_dir
                << "/errormap.tsv\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
