#pragma once

// Independent oracles used by the test suites. Everything here is computed
// by a different route than the library code it checks.

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace rbanova::testing {

/// Eigenvalues of the unit-variance kernel exp(-|x-y|/alpha) on [0,1] from
/// the transcendental characteristic equations (bisection), descending.
std::vector<double> analytic_exponential_eigenvalues(double alpha, int count);

/// Smallest M whose sorted tensor-product eigenvalue sum reaches
/// fraction * sigma^2.
int tensor_truncation_count(const std::vector<double>& mu_1d, double sigma, double fraction);

/// Posterior mean of xi on [-1,1]^dim for data d = g(xi) + N(0, sigma^2 I),
/// by tensor-product Simpson quadrature with `panels` panels per dimension.
Eigen::VectorXd quadrature_posterior_mean(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& g, const Eigen::VectorXd& data,
    double noise_sigma, int dim, int panels);

/// Batch-means standard error of the mean of a (possibly autocorrelated)
/// scalar series.
double batch_means_se(const std::vector<double>& series, int n_batches);

}  // namespace rbanova::testing
