#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "parasurf/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace parasurf;

int main(int argc, char** argv) {
  CLI::App app{"parasurf: invariant tori of Hamiltonians on translation surfaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "runs/latest";
  std::int64_t seed = -1;
  int workers = 1;
  bool verbose = false;
  app.add_option("--config", config_path, "experiment config (INI)");
  app.add_option("--out", out_dir, "output directory (PARASURF_OUT overrides)");
  app.add_option("--seed", seed, "override run.seed");
  app.add_option("--workers", workers, "worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "print per-iteration diagnostics");

  auto* solve = app.add_subcommand("solve", "run the fixed-point iteration and verify conjugacy");
  auto* check = app.add_subcommand("check-identities", "run the algebraic identity suite");
  auto* ce = app.add_subcommand("ce", "solve one scalar cohomological equation");
  auto* obs = app.add_subcommand("obstructions", "count invariant distributions for each s");
  auto* sweep = app.add_subcommand("sweep", "solve over a list of perturbation sizes");
  auto* report = app.add_subcommand("report", "summarise a finished run");
  std::string run_dir;
  report->add_option("run_dir", run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      std::cout << cli::report(run_dir);
      return 0;
    }
    cli::ExperimentConfig cfg = config_path.empty() ? cli::ExperimentConfig{} : cli::load_config(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    cli::validate(cfg);

    cli::RunContext rc;
    if (const char* env = std::getenv("PARASURF_OUT"); env && *env) out_dir = env;
    rc.out = out_dir;
    rc.workers = workers;
    rc.verbose = verbose;
    fs::create_directories(rc.out);

    int code = 0;
    if (solve->parsed()) code = cli::cmd_solve(cfg, rc);
    else if (check->parsed()) code = cli::cmd_check_identities(cfg, rc);
    else if (ce->parsed()) code = cli::cmd_ce(cfg, rc);
    else if (obs->parsed()) code = cli::cmd_obstructions(cfg, rc);
    else if (sweep->parsed()) code = cli::cmd_sweep(cfg, rc);
    std::cout << cli::report(rc.out);
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
