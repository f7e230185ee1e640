#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mutualhold/config.hpp"
#include "mutualhold/experiments.hpp"
#include "mutualhold/validate.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Mutual-holding mean-field simulator: equilibrium particle systems "
      "and the default-probability fixed point"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string absorption;
  std::size_t threads = 0;
  bool full_scale = false;
  bool no_crn = false;

  app.add_option("--config", config_path,
                 "configuration file (key=value lines)")
      ->check(CLI::ExistingFile);
  CLI::Option* seed_opt = app.add_option("--seed", seed, "master seed");
  CLI::Option* out_opt = app.add_option("--out", out_dir, "output directory");
  CLI::Option* abs_opt =
      app.add_option("--absorption", absorption,
                     "in-step absorption test: bridge | discrete")
          ->check(CLI::IsMember({"bridge", "discrete"}));
  CLI::Option* threads_opt =
      app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_flag("--full-scale", full_scale,
               "full-scale sample sizes (slower)");
  app.add_flag("--no-crn", no_crn, "fresh noise on every fixed-point sweep");

  CLI::App* fp = app.add_subcommand(
      "fixed-point", "solve the default-probability fixed point");
  CLI::App* cmp = app.add_subcommand(
      "compare", "baseline vs equilibrium particles vs fixed point");
  CLI::App* sim =
      app.add_subcommand("simulate", "one particle-system run");
  CLI::App* val =
      app.add_subcommand("validate", "internal consistency checks");
  for (CLI::App* sub : {fp, cmp, sim, val}) sub->fallthrough();

  std::string mode = "equilibrium";
  int level = 10;
  sim->add_option("--mode", mode, "equilibrium | baseline | smoothed")
      ->check(CLI::IsMember({"equilibrium", "baseline", "smoothed"}));
  sim->add_option("--level", level, "mollifier level for --mode smoothed")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    mutualhold::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = mutualhold::load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.out = out_dir;
    if (*abs_opt) cfg.absorption = absorption;
    if (*threads_opt) cfg.threads = threads;
    if (no_crn) cfg.crn = false;
    if (full_scale) cfg.apply_full_scale();

    if (fp->parsed()) return mutualhold::run_fixed_point_command(cfg, std::cout);
    if (cmp->parsed()) return mutualhold::run_compare_command(cfg, std::cout);
    if (sim->parsed())
      return mutualhold::run_simulate_command(cfg, mode, level, std::cout);
    return mutualhold::run_validate_command(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
