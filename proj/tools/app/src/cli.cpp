#include <ostream>

#include "CLI11.hpp"
#include "npmix_app/cli.hpp"

namespace npmix::app {

namespace {

void add_run_flags(CLI::App* cmd, RunOptions& options, bool with_out) {
  cmd->add_option("--data", options.data, "Delimited data file with a header row")
      ->required();
  cmd->add_option("--config", options.config, "JSON run configuration")
      ->required();
  cmd->add_option("--seed", options.seed, "Master seed (overrides the config)");
  cmd->add_option("--threads", options.threads, "Worker threads; 0 uses all cores");
  if (with_out) cmd->add_option("--out", options.out, "Results JSON path");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonparametric pattern-mixture estimation with donor-based restrictions",
               "npmix"};
  app.require_subcommand(1);

  RunOptions estimate_opts;
  auto* estimate = app.add_subcommand("estimate", "Estimate functionals under one restriction");
  add_run_flags(estimate, estimate_opts, true);
  estimate->add_option("--export-completed", estimate_opts.export_completed,
                       "Write the completed sample (long format) to this CSV");

  RunOptions sensitivity_opts;
  auto* sensitivity =
      app.add_subcommand("sensitivity", "Compare functionals across several restrictions");
  add_run_flags(sensitivity, sensitivity_opts, true);
  sensitivity->add_flag("--uncoupled", sensitivity_opts.uncoupled,
                        "Give each restriction its own derived seed");

  SimulateOptions simulate_opts;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic trial with dropout");
  simulate->add_option("--config", simulate_opts.config, "JSON simulation configuration")
      ->required();
  simulate->add_option("--out", simulate_opts.out, "Output directory")->required();
  simulate->add_option("--seed", simulate_opts.seed, "Seed (overrides the config)");

  RunOptions validate_opts;
  auto* validate = app.add_subcommand("validate", "Report donor sets reachable from the data");
  add_run_flags(validate, validate_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  if (*estimate) return cmd_estimate(estimate_opts, out, err);
  if (*sensitivity) return cmd_sensitivity(sensitivity_opts, out, err);
  if (*simulate) return cmd_simulate(simulate_opts, out, err);
  return cmd_validate(validate_opts, out, err);
}

}  // namespace npmix::app
