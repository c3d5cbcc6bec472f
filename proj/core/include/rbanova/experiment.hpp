#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rbanova/analysis.hpp"
#include "rbanova/mcmc.hpp"

namespace rbanova {

/// Flat dotted-key experiment configuration. Unknown keys are rejected;
/// missing keys fall back to the defaults below. The hash is taken over the
/// canonical (sorted, whitespace-normalized) key=value rendering, so
/// semantically identical files hash equal.
struct ExperimentConfig {
  int grid_n = 16;
  double kl_alpha = 5.0;
  double kl_sigma = 0.25;
  double kl_fraction = 0.95;
  double kl_mean = 1.0;
  double noise_sigma = 0.001;
  double proposal_step = 0.03;
  long mcmc_n = 50000;
  std::uint64_t mcmc_seed = 1;
  std::string mcmc_mode = "full";  // full | prior | adaptive
  double tol_anova = 1e-4;
  double tol_rb = 1e-4;
  double tol_pod = 1e-4;
  long n_model = 500;
  int order_cap = 3;
  int sensors_per_side = 3;
  std::uint64_t truth_seed = 7;
  std::uint64_t noise_seed = 8;
  bool data_refine = false;  // generate data on a once-refined grid
  std::string out_dir = "out";
  std::string data_path;   // default: <out_dir>/data.txt
  std::string truth_path;  // default: <out_dir>/truth.txt
  std::string model_dir;   // default: <out_dir>/model

  static ExperimentConfig parse_file(const std::filesystem::path& path);
  static ExperimentConfig parse_text(const std::string& text);

  std::string canonical_text() const;
  std::string hash() const;  // 16 hex chars
  void write(const std::filesystem::path& path) const;

  std::filesystem::path resolved_data_path() const;
  std::filesystem::path resolved_truth_path() const;
  std::filesystem::path resolved_model_dir() const;

  SurrogateTolerances tolerances() const { return {tol_anova, tol_rb, tol_pod}; }
};

/// Synthetic observations: truth xi from the prior at truth_seed (retrying
/// with the next seed on a nonpositive field), forward solve (optionally on
/// a refined grid), sensor readings plus Gaussian noise from noise_seed.
/// Writes the data and truth files named by the config.
struct GenDataResult {
  Eigen::VectorXd data;
  Eigen::VectorXd xi_true;
  std::uint64_t truth_seed_used;
};
GenDataResult gen_data(const ExperimentConfig& config);

/// Build the prior-sample surrogate for the config and save its container
/// under model_dir.
void build_surrogate_cmd(const ExperimentConfig& config);

/// Dispatch on mcmc.mode; writes chain CSV, metrics report, and a metadata
/// sidecar (seed, config hash, rebuild history) into out_dir.
struct RunResult {
  McmcResult mcmc;
  std::filesystem::path chain_csv;
  std::filesystem::path metrics_path;
};
RunResult run_experiment(const ExperimentConfig& config);

/// Recompute metrics and field estimates for an existing chain CSV;
/// optionally compare against a reference chain CSV (eps_mean / eps_var).
void analyze_chain(const ExperimentConfig& config, const std::filesystem::path& chain_csv,
                   const std::filesystem::path& reference_csv = {});

/// Matched-seed full / prior / adaptive comparison. "desk" runs the three
/// chains and emits cost and error tables; "paper" only writes the
/// full-scale configuration files.
void reproduce(const std::string& profile, const std::filesystem::path& out_dir);

// Chain CSV: header iter,accepted,cost_cum,xi_1..xi_M; 17 significant digits.
void write_chain_csv(const std::filesystem::path& path, const Chain& chain);
Chain read_chain_csv(const std::filesystem::path& path);

}  // namespace rbanova
