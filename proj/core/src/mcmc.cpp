#include "rbanova/mcmc.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace rbanova {

namespace {

bool in_prior_box(const Eigen::VectorXd& xi) { return (xi.array().abs() <= 1.0).all(); }

std::vector<Eigen::VectorXd> draw_prior_samples(int dim, long count, Rng& rng) {
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (long j = 0; j < count; ++j) samples.push_back(rng.uniform_box(dim));
  return samples;
}

// Shared MH loop appending into a caller-owned chain. The hook fires after
// state j+1 is appended (paper loop index j) and may swap the forward model
// and refresh the current log posterior; the per-state cost snapshot is
// taken afterwards so rebuild costs land on the row that triggered them.
using IterationHook = std::function<void(long j, const Eigen::VectorXd& state, double& log_post)>;

void drive_chain(Chain& chain, const InverseProblem& problem, const ProposalSpec& proposal,
                 ForwardModel& forward, long n, std::uint64_t seed, CostLedger& ledger,
                 const IterationHook& hook) {
  if (n < 1) throw std::invalid_argument("mcmc: n must be >= 1");
  if (!(problem.noise_sigma > 0.0))
    throw std::invalid_argument("mcmc: noise sigma must be positive");
  chain.seed = seed;
  chain.states.reserve(static_cast<std::size_t>(n));
  chain.accepted.reserve(static_cast<std::size_t>(n));
  chain.cost_cum.reserve(static_cast<std::size_t>(n));

  Rng init_rng(seed, "chain-init");
  Eigen::VectorXd state = init_rng.uniform_box(problem.dim);
  double log_post = log_posterior_unnormalized(problem, state, forward.evaluate(state, ledger));
  chain.states.push_back(state);
  chain.accepted.push_back(1);
  chain.cost_cum.push_back(ledger.total());

  Rng walk_rng(seed, "chain-walk");
  for (long j = 1; j < n; ++j) {
    const StepOutcome outcome =
        mh_step(state, log_post, proposal, problem, forward, walk_rng, ledger);
    chain.states.push_back(state);
    chain.accepted.push_back(outcome.accepted ? 1 : 0);
    if (hook) hook(j, state, log_post);
    chain.cost_cum.push_back(ledger.total());
  }
}

}  // namespace

double log_posterior_unnormalized(const InverseProblem& problem, const Eigen::VectorXd& xi,
                                  const Eigen::VectorXd& forward_output) {
  if (forward_output.size() != problem.data.size())
    throw std::invalid_argument("log_posterior: forward output / data length mismatch");
  if (!in_prior_box(xi)) return -std::numeric_limits<double>::infinity();
  const double s2 = problem.noise_sigma * problem.noise_sigma;
  return -(problem.data - forward_output).squaredNorm() / (2.0 * s2);
}

StepOutcome mh_step(Eigen::VectorXd& state, double& log_post, const ProposalSpec& proposal,
                    const InverseProblem& problem, ForwardModel& forward, Rng& rng,
                    CostLedger& ledger) {
  if (!std::isfinite(log_post))
    throw std::logic_error("mh_step: current state has non-finite log posterior");
  const Eigen::VectorXd candidate = state + proposal.step_sigma * rng.normal_vector(problem.dim);
  StepOutcome outcome;
  if (!in_prior_box(candidate)) return outcome;  // free rejection, no forward solve
  outcome.in_box = true;

  const Eigen::VectorXd prediction = forward.evaluate(candidate, ledger);
  const double candidate_log_post = log_posterior_unnormalized(problem, candidate, prediction);
  // symmetric proposal: the Hastings factor is 1 and the ratio reduces to
  // the posterior ratio, handled in log space
  const double log_ratio = candidate_log_post - log_post;
  if (std::log(rng.uniform01()) < log_ratio) {
    state = candidate;
    log_post = candidate_log_post;
    outcome.accepted = true;
  }
  return outcome;
}

FemForward::FemForward(const AffineOperatorFamily& ops, const SensorSet& sensors)
    : ops_(&ops), sensors_(&sensors), solver_(ops) {}

Eigen::VectorXd FemForward::evaluate(const Eigen::VectorXd& xi, CostLedger& ledger) {
  const Snapshot u = solver_.solve(xi);
  ledger.add_full_solve();
  return observe(u, ops_->grid, *sensors_);
}

McmcResult run_mcmc(const InverseProblem& problem, ForwardModel& forward,
                    const ProposalSpec& proposal, long n, std::uint64_t seed, double n_h) {
  McmcResult result;
  result.ledger.n_h = n_h;
  drive_chain(result.chain, problem, proposal, forward, n, seed, result.ledger, {});
  return result;
}

McmcResult run_full_mcmc(const InverseProblem& problem, const AffineOperatorFamily& ops,
                         const SensorSet& sensors, const ProposalSpec& proposal, long n,
                         std::uint64_t seed) {
  FemForward forward(ops, sensors);
  return run_mcmc(problem, forward, proposal, n, seed, ops.grid.total_nodes());
}

McmcResult run_prior_rb_mcmc(const InverseProblem& problem, const AffineOperatorFamily& ops,
                             const KlExpansion& kl, const SensorSet& sensors,
                             const ProposalSpec& proposal, long n, long n_model,
                             const SurrogateTolerances& tol, int order_cap,
                             std::uint64_t seed) {
  if (n_model < 2) throw std::invalid_argument("run_prior_rb_mcmc: n_model must be >= 2");
  McmcResult result;
  result.ledger.n_h = ops.grid.total_nodes();

  Rng model_rng(seed, "model-prior-samples");
  const auto prior_samples = draw_prior_samples(problem.dim, n_model, model_rng);
  result.model = build_surrogate(prior_samples, ops, kl, tol, order_cap, result.ledger);

  SurrogateForward forward(*result.model, sensors);
  drive_chain(result.chain, problem, proposal, forward, n, seed, result.ledger, {});
  return result;
}

McmcResult run_adaptive_mcmc(const InverseProblem& problem, const AffineOperatorFamily& ops,
                             const KlExpansion& kl, const SensorSet& sensors,
                             const ProposalSpec& proposal, long n, long n_model,
                             const SurrogateTolerances& tol, int order_cap,
                             std::uint64_t seed) {
  if (n_model < 2) throw std::invalid_argument("run_adaptive_mcmc: n_model must be >= 2");
  McmcResult result;
  result.ledger.n_h = ops.grid.total_nodes();

  Rng model_rng(seed, "model-prior-samples");
  const auto prior_samples = draw_prior_samples(problem.dim, n_model, model_rng);
  result.model = build_surrogate(prior_samples, ops, kl, tol, order_cap, result.ledger);

  SurrogateForward forward(*result.model, sensors);
  bool update_active = true;
  Chain& chain = result.chain;

  IterationHook hook = [&](long j, const Eigen::VectorXd& state, double& log_post) {
    if (j % n_model != 0 || !update_active) return;
    RebuildRecord record;
    record.iteration = j;
    record.index_set_before = result.model->indices.active;

    // the last n_model chain states xi^{(j-n_model+1)} .. xi^{(j)}
    const auto first = chain.states.begin() + static_cast<std::ptrdiff_t>(j - n_model);
    std::vector<Eigen::VectorXd> window(first, first + static_cast<std::ptrdiff_t>(n_model));
    SurrogateModel rebuilt = build_surrogate(window, ops, kl, tol, order_cap, result.ledger);

    record.index_set_after = rebuilt.indices.active;
    record.stopped_updates = (record.index_set_after == record.index_set_before);
    if (record.stopped_updates) update_active = false;

    *result.model = std::move(rebuilt);
    forward.rebind(*result.model);
    // the stored log posterior was computed under the old model
    log_post =
        log_posterior_unnormalized(problem, state, forward.evaluate(state, result.ledger));
    result.rebuilds.push_back(std::move(record));
  };

  drive_chain(chain, problem, proposal, forward, n, seed, result.ledger, hook);
  return result;
}

}  // namespace rbanova
