#include <iostream>

#include "CLI11.hpp"
#include "edm/cli.hpp"

int main(int argc, char** argv) {
  using namespace edm::cli;
  CLI::App app{"Exponential decision making network simulator"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write its logs");
  simulate->add_option("--config", sim.config, "JSON config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Override the config seed");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Avalanche and branching statistics from logs");
  analyze->add_option("--spikes", ana.spikes, "spikes.csv")->required()->check(CLI::ExistingFile);
  analyze->add_option("--snapshots", ana.snapshots, "snapshots.csv")->check(CLI::ExistingFile);
  analyze->add_option("--bin", ana.bin, "Avalanche bin width in ms")->capture_default_str();
  analyze->add_option("--out", ana.out, "Output directory")->required();

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Run a one-axis parameter grid");
  sweep->add_option("--spec", sw.spec, "Sweep spec JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--parallel", sw.parallel, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kFailure;
  }

  init_logging();
  if (*simulate) return cmd_simulate(sim, std::cout);
  if (*analyze) return cmd_analyze(ana, std::cout);
  return cmd_sweep(sw, std::cout);
}
