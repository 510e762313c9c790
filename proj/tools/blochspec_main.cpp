// blochspec CLI: check | bands | evolve | resolvent
//
// Exit codes: 0 success/pass, 1 condition failed, 2 usage/config error,
// 3 numerical failure.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blochspec/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bloch-spectral pipeline for the linearized lattice "
               "Schrodinger-Poisson-Newton model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  unsigned workers = 0;
  std::uint64_t seed = 0;
  bool seed_set = false, workers_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--workers", workers, "worker thread count (0 = auto)")
        ->each([&](const std::string&) { workers_set = true; });
    cmd->add_option("--seed", seed, "random seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* c_check = app.add_subcommand("check", "Jellium + Wiener conditions");
  CLI::App* c_bands = app.add_subcommand("bands", "band sweep over the zone");
  CLI::App* c_evolve = app.add_subcommand("evolve", "dispersion decay table");
  CLI::App* c_resolvent =
      app.add_subcommand("resolvent", "limiting absorption scan");
  for (CLI::App* c : {c_check, c_bands, c_evolve, c_resolvent}) add_common(c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    blochspec::RunConfig config = blochspec::RunConfig::from_file(config_path);
    if (workers_set) config.workers = workers;
    if (seed_set) config.seed = seed;

    if (c_check->parsed()) return blochspec::cmd_check(config, out_dir);
    if (c_bands->parsed()) return blochspec::cmd_bands(config, out_dir);
    if (c_evolve->parsed()) return blochspec::cmd_evolve(config, out_dir);
    if (c_resolvent->parsed()) return blochspec::cmd_resolvent(config, out_dir);
    return 2;
  } catch (const blochspec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const blochspec::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
