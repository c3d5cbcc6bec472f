// rbanova command line driver: synthetic data generation, surrogate
// construction, the three MCMC modes, chain analysis, and the desk/paper
// reproduction bundles.

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>

#include "rbanova/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive reduced-basis ANOVA surrogate MCMC for Bayesian inversion"};
  app.require_subcommand(1);

  std::string config_path;
  std::string chain_path;
  std::string reference_path;
  std::string profile = "desk";
  std::string out_dir = "out/reproduce";

  auto* gen = app.add_subcommand("gen-data", "Generate synthetic sensor data and a truth file");
  gen->add_option("-c,--config", config_path, "experiment config file")->required();

  auto* build = app.add_subcommand("build-surrogate",
                                   "Build the prior-sample surrogate and save its container");
  build->add_option("-c,--config", config_path, "experiment config file")->required();

  auto* run = app.add_subcommand("run", "Run the configured MCMC mode (full|prior|adaptive)");
  run->add_option("-c,--config", config_path, "experiment config file")->required();

  auto* analyze = app.add_subcommand("analyze", "Recompute metrics and field estimates for a chain");
  analyze->add_option("-c,--config", config_path, "experiment config file")->required();
  analyze->add_option("--chain", chain_path, "chain CSV to analyze")->required();
  analyze->add_option("--reference", reference_path,
                      "reference chain CSV for eps_mean / eps_var");

  auto* repro = app.add_subcommand("reproduce", "Matched full/prior/adaptive comparison bundle");
  repro->add_option("--profile", profile, "desk (runs) or paper (configs only)");
  repro->add_option("-o,--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto config = rbanova::ExperimentConfig::parse_file(config_path);
      const auto result = rbanova::gen_data(config);
      std::cout << "data written (" << result.data.size() << " sensors, truth seed "
                << result.truth_seed_used << ")\n";
    } else if (build->parsed()) {
      rbanova::build_surrogate_cmd(rbanova::ExperimentConfig::parse_file(config_path));
    } else if (run->parsed()) {
      const auto config = rbanova::ExperimentConfig::parse_file(config_path);
      const auto result = rbanova::run_experiment(config);
      std::cout << "chain written to " << result.chain_csv.string() << " (cost "
                << result.mcmc.ledger.total() << " units)\n";
    } else if (analyze->parsed()) {
      const auto config = rbanova::ExperimentConfig::parse_file(config_path);
      rbanova::analyze_chain(config, chain_path, reference_path);
      std::cout << "analysis written next to " << chain_path << "\n";
    } else if (repro->parsed()) {
      rbanova::reproduce(profile, out_dir);
      std::cout << "reproduction bundle written to " << out_dir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "rbanova: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
