// Command-line front end. One subcommand per invocation; all file outputs
// land in --out. Exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 assertion failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wavebox/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for energy decay of the damped wave equation in a box"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> kCommands = {
      {"validate", "check a config and report derived geometry"},
      {"rays", "trace sampled billiard rays against a control region"},
      {"simulate", "run a damped wave solve and record the energy trace"},
      {"decay-fit", "fit a power-law envelope and halving clock to a trace"},
      {"packets-verify", "run the wave-packet kernel verification sweeps"},
      {"lemma-check", "verify the decay iteration lemma on profiles"},
      {"observability", "compute observability ratios for modal states"}};

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool quiet = false;

  for (const auto& [name, desc] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "path to the experiment config")->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_flag("--quiet", quiet, "suppress the success summary line");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  wavebox::ExperimentConfig cfg;
  try {
    cfg = wavebox::parse_config(wavebox::read_text_file(config_path));
  } catch (const wavebox::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (sub->count("--seed") > 0) cfg.seed = seed;

  wavebox::CommandOutcome outcome = wavebox::run_command(name, cfg, out_dir);
  if (outcome.exit_code != 0) {
    std::cerr << outcome.message << "\n";
  } else if (!quiet) {
    std::cout << outcome.message << "\n";
  }
  return outcome.exit_code;
}
