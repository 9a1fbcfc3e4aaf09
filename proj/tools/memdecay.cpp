// memdecay: hypothesis checks, simulation runs and oracle comparisons for
// viscoelastic equations with infinite memory.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "memdecay/config.hpp"
#include "memdecay/error.hpp"
#include "memdecay/experiment.hpp"

namespace {

using memdecay::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy decay laboratory for viscoelastic equations with infinite memory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string preset;
  std::string init_preset = "paper-example-q3";
  unsigned workers = 1;

  const auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "experiment configuration (INI)");
    sub->add_option("--preset", preset, "built-in configuration")
        ->check(CLI::IsMember(memdecay::preset_names()));
    if (needs_out) {
      sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
      sub->add_option("--modes-parallel", workers, "worker threads across modes")
          ->check(CLI::PositiveNumber);
    }
  };
  CLI::App* check = app.add_subcommand("check", "validate hypotheses and CFL");
  add_common(check, false);
  CLI::App* run = app.add_subcommand("run", "simulate, compute energies, fit bounds");
  add_common(run, true);
  CLI::App* oracle = app.add_subcommand("oracle-compare", "compare with the augmented-ODE oracle");
  add_common(oracle, true);
  CLI::App* init = app.add_subcommand("init", "write an annotated configuration");
  init->add_option("--preset", init_preset, "preset to start from")
      ->capture_default_str()
      ->check(CLI::IsMember(memdecay::preset_names()));
  init->add_option("--config", config_path, "file to create")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::usage);
  }

  try {
    if (init->parsed()) {
      memdecay::cmd_init(init_preset, config_path);
      std::cout << "wrote " << config_path << '\n';
      return 0;
    }
    if (config_path.empty() == preset.empty()) {
      std::cerr << "error: give exactly one of --config and --preset\n";
      return code(ExitCode::usage);
    }
    const memdecay::ExperimentConfig config =
        preset.empty() ? memdecay::load_config(config_path) : memdecay::preset_config(preset);
    const memdecay::Experiment experiment = memdecay::build_experiment(config, workers);
    const std::string dir = out_dir.empty() ? config.output_directory : out_dir;

    if (check->parsed()) return code(memdecay::cmd_check(experiment, std::cout).code);
    if (run->parsed()) return code(memdecay::cmd_run(experiment, dir, std::cout).code);
    return code(memdecay::cmd_oracle_compare(experiment, dir, std::cout).code);
  } catch (const memdecay::Error& e) {
    std::cerr << "error (" << memdecay::to_string(e.kind()) << "): " << e.what() << '\n';
    return code(memdecay::exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return code(ExitCode::usage);
  }
}
