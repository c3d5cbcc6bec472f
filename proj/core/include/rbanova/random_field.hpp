#pragma once

#include <Eigen/Core>
#include <vector>

#include "rbanova/grid.hpp"

namespace rbanova {

/// Separable exponential covariance
/// Cov(x,y) = sigma^2 exp(-|x1-y1|/alpha - |x2-y2|/alpha).
struct ExponentialCovariance {
  double sigma;  // standard deviation
  double alpha;  // correlation length
};

struct Eigenpair1d {
  double lambda;
  Eigen::VectorXd phi;  // nodal values on the 1D grid
};

/// Galerkin eigendecomposition of the unit-variance 1D factor kernel
/// exp(-|x-y|/alpha) on [0,1]: piecewise-linear trial/test space on the
/// n_nodes grid, per-element Gauss quadrature of the kernel, generalized
/// symmetric eigenproblem against the consistent mass matrix. Eigenvalues
/// nonnegative and descending; eigenfunctions mass-orthonormal with a
/// deterministic sign convention.
std::vector<Eigenpair1d> eigenpairs_1d(const ExponentialCovariance& cov, int n_nodes);

/// Exact L2(0,1) inner product of two nodal functions via the P1 mass matrix.
double mass_inner_1d(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Truncated KL expansion of the 2D field on a grid. Eigenpairs are tensor
/// products of 1D pairs; modes are stored as full-grid nodal vectors.
class KlExpansion {
 public:
  UniformGrid grid;
  Eigen::VectorXd mean;         // a0, all nodes
  Eigen::VectorXd eigenvalues;  // lambda_1 >= ... >= lambda_M > 0 (sigma^2 included)
  Eigen::MatrixXd modes;        // total_nodes x M, unit L2 norm columns
  double variance_fraction_captured = 0.0;

  int n_modes() const { return static_cast<int>(eigenvalues.size()); }
};

/// Build the KL expansion retaining the smallest M whose eigenvalue sum
/// reaches fraction * sigma^2. The mean field is constant mean_value by
/// default; pass a nodal vector to override.
KlExpansion build_kl(const ExponentialCovariance& cov, const UniformGrid& grid,
                     double fraction, double mean_value = 1.0);
KlExpansion build_kl(const ExponentialCovariance& cov, const UniformGrid& grid,
                     double fraction, const Eigen::VectorXd& mean_field);

/// Nodal permeability a(x,xi) = a0 + sum_k sqrt(lambda_k) a_k xi_k.
/// Raises std::domain_error if any nodal value is <= 0 (ellipticity lost),
/// reporting the minimum and its location.
Eigen::VectorXd evaluate_field(const KlExpansion& kl, const Eigen::VectorXd& xi);

/// Same sum without the positivity check, for statistics over arbitrary xi.
Eigen::VectorXd evaluate_field_unchecked(const KlExpansion& kl, const Eigen::VectorXd& xi);

/// Exact L2(D) inner product of two full-grid nodal fields under the
/// bilinear (tensor P1) mass matrix.
double mass_inner_2d(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const UniformGrid& grid);

}  // namespace rbanova
