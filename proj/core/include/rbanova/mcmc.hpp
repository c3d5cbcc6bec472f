#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <vector>

#include "rbanova/cost.hpp"
#include "rbanova/fem.hpp"
#include "rbanova/rng.hpp"
#include "rbanova/surrogate.hpp"

namespace rbanova {

/// Bayesian inverse problem: uniform prior on [-1,1]^M, Gaussian noise.
struct InverseProblem {
  Eigen::VectorXd data;
  double noise_sigma;
  int dim;
};

/// Isotropic Gaussian random-walk proposal (symmetric, so the Hastings
/// factor is identically one).
struct ProposalSpec {
  double step_sigma = 0.03;
};

struct Chain {
  std::vector<Eigen::VectorXd> states;
  std::vector<std::uint8_t> accepted;  // first entry is 1 by convention
  std::vector<double> cost_cum;        // ledger total after each state
  std::uint64_t seed = 0;

  int length() const { return static_cast<int>(states.size()); }
};

/// Forward map xi -> predicted observations, billing its cost per call.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual Eigen::VectorXd evaluate(const Eigen::VectorXd& xi, CostLedger& ledger) = 0;
};

class FemForward : public ForwardModel {
 public:
  FemForward(const AffineOperatorFamily& ops, const SensorSet& sensors);
  Eigen::VectorXd evaluate(const Eigen::VectorXd& xi, CostLedger& ledger) override;

 private:
  const AffineOperatorFamily* ops_;
  const SensorSet* sensors_;
  FullSolver solver_;
};

class SurrogateForward : public ForwardModel {
 public:
  SurrogateForward(const SurrogateModel& model, const SensorSet& sensors)
      : model_(&model), sensors_(&sensors) {}
  Eigen::VectorXd evaluate(const Eigen::VectorXd& xi, CostLedger& ledger) override {
    return model_->predict(xi, *sensors_, &ledger);
  }
  void rebind(const SurrogateModel& model) { model_ = &model; }

 private:
  const SurrogateModel* model_;
  const SensorSet* sensors_;
};

/// Unnormalized log posterior: -||d - G(xi)||^2 / (2 sigma_eps^2) inside the
/// prior box, -inf outside.
double log_posterior_unnormalized(const InverseProblem& problem, const Eigen::VectorXd& xi,
                                  const Eigen::VectorXd& forward_output);

struct StepOutcome {
  bool accepted = false;
  bool in_box = false;
};

/// One Metropolis-Hastings step. Proposals leaving the prior box are
/// rejected without evaluating the forward model (zero cost).
StepOutcome mh_step(Eigen::VectorXd& state, double& log_post, const ProposalSpec& proposal,
                    const InverseProblem& problem, ForwardModel& forward, Rng& rng,
                    CostLedger& ledger);

/// One surrogate rebuild event in the adaptive scheme.
struct RebuildRecord {
  long iteration;
  std::set<AnovaIndex> index_set_before;
  std::set<AnovaIndex> index_set_after;
  bool stopped_updates;
};

struct McmcResult {
  Chain chain;
  CostLedger ledger;
  std::vector<RebuildRecord> rebuilds;
  std::optional<SurrogateModel> model;
};

/// Standard MH against an arbitrary forward model: initial state from the
/// prior, n states total, the ledger normalization n_h as given.
McmcResult run_mcmc(const InverseProblem& problem, ForwardModel& forward,
                    const ProposalSpec& proposal, long n, std::uint64_t seed,
                    double n_h = 1.0);

/// Standard MH with the finite-element forward model.
McmcResult run_full_mcmc(const InverseProblem& problem, const AffineOperatorFamily& ops,
                         const SensorSet& sensors, const ProposalSpec& proposal, long n,
                         std::uint64_t seed);

/// Surrogate built once from n_model prior draws, then plain MH.
McmcResult run_prior_rb_mcmc(const InverseProblem& problem, const AffineOperatorFamily& ops,
                             const KlExpansion& kl, const SensorSet& sensors,
                             const ProposalSpec& proposal, long n, long n_model,
                             const SurrogateTolerances& tol, int order_cap, std::uint64_t seed);

/// Adaptive scheme: initial surrogate from prior draws; every n_model
/// iterations (while updates are active) the model is rebuilt from the last
/// n_model chain states and the current state's posterior re-evaluated under
/// the new model; updates stop permanently once the rebuilt index set equals
/// the previous one.
McmcResult run_adaptive_mcmc(const InverseProblem& problem, const AffineOperatorFamily& ops,
                             const KlExpansion& kl, const SensorSet& sensors,
                             const ProposalSpec& proposal, long n, long n_model,
                             const SurrogateTolerances& tol, int order_cap, std::uint64_t seed);

}  // namespace rbanova
