#pragma once

#include <Eigen/Core>
#include <utility>

#include "rbanova/mcmc.hpp"
#include "rbanova/random_field.hpp"

namespace rbanova {

/// Nodal mean and population variance of the permeability field over a
/// chain (repeats included).
struct FieldEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  long n_samples = 0;
};

/// Streaming (Welford) accumulation; variance divides by N to match the
/// population formula.
FieldEstimate field_moments(const Chain& chain, const KlExpansion& kl);
/// Two-pass recomputation, for verification against the streaming path.
FieldEstimate field_moments_two_pass(const Chain& chain, const KlExpansion& kl);

Eigen::VectorXd mean_field(const Chain& chain, const KlExpansion& kl);
Eigen::VectorXd variance_field(const Chain& chain, const KlExpansion& kl);

/// eps = ||estimate - actual||_0 / ||actual||_0 with the all-node
/// trapezoidal L2(D) norm.
double error_vs_actual(const Eigen::VectorXd& estimate_mean, const Eigen::VectorXd& actual,
                       const UniformGrid& grid);

/// (eps_mean, eps_var) of an estimate against a reference estimate.
std::pair<double, double> error_vs_reference(const FieldEstimate& estimate,
                                             const FieldEstimate& reference,
                                             const UniformGrid& grid);

/// Accepted samples over total sample size (mean of the accept flags).
double acceptance_rate(const Chain& chain);

}  // namespace rbanova
