#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace rheoflame;
using namespace rheoflame::cli;

int main(int argc, char** argv) {
  CLI::App app{"Wildfire-front nets for rheonomic Finsler metrics"};
  app.require_subcommand(1);

  std::string scenario_path;
  Overrides o;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--rays", o.rays, "Number of rays");
    cmd->add_option("--abs-tol", o.abs_tol, "Absolute integrator tolerance");
    cmd->add_option("--rel-tol", o.rel_tol, "Relative integrator tolerance");
    cmd->add_option("--levels", o.levels, "Number of frontal levels");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Build the net and export it");
  CLI::App* freeze_cmd = app.add_subcommand("freeze", "Extract the time field and compare frozen geodesics");
  CLI::App* droplets = app.add_subcommand("droplets", "Huyghens droplets against a later frontal");
  CLI::App* verify = app.add_subcommand("verify", "Run the diagnostic battery");
  for (CLI::App* cmd : {simulate, freeze_cmd, droplets, verify}) common(cmd);
  droplets->add_option("--delta", o.delta, "Droplet duration");
  droplets->add_option("--level-index", o.level_index, "Source frontal level, 1-based");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    Scenario sc = load_scenario(scenario_path);
    apply(sc, o);
    if (simulate->parsed()) {
      cmd_simulate(sc, std::cout);
      return exit_pass;
    }
    if (freeze_cmd->parsed()) return cmd_freeze(sc, std::cout).pass ? exit_pass : exit_failed;
    if (droplets->parsed()) return cmd_droplets(sc, o.level_index, o.delta, std::cout).pass ? exit_pass : exit_failed;
    return cmd_verify(sc, std::cout).pass ? exit_pass : exit_failed;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
}
