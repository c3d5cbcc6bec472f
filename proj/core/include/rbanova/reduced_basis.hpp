#pragma once

#include <Eigen/Core>
#include <vector>

#include "rbanova/anova.hpp"
#include "rbanova/fem.hpp"

namespace rbanova {

/// Orthonormal reduced basis for one ANOVA term's local problem.
struct ReducedBasis {
  AnovaIndex index;
  Eigen::MatrixXd basis;  // interior_count x N_r, orthonormal columns

  int size() const { return static_cast<int>(basis.cols()); }
};

/// POD: left singular vectors of the snapshot matrix whose relative singular
/// values satisfy sigma_k/sigma_1 > tol_pod. An all-zero snapshot set raises
/// std::runtime_error.
ReducedBasis pod(const std::vector<Eigen::VectorXd>& snapshots, double tol_pod,
                 AnovaIndex index = {});

/// Orthonormalize `snapshot` against the basis (modified Gram-Schmidt with
/// one re-orthogonalization pass) and append it; a snapshot already in the
/// span (residual <= 1e-10 * its norm) leaves the basis unchanged.
ReducedBasis augment(const ReducedBasis& q, const Eigen::VectorXd& snapshot);

/// Offline projection of the local problem for (c, t): the anchor is folded
/// into the base matrix once, each in-t mode is projected separately, so the
/// online assembly is independent of N_h.
struct ReducedLocalSystem {
  AnovaIndex index;
  Eigen::MatrixXd base;                // Q^T (A0 + sum_{k not in t} c_k A_k) Q
  std::vector<Eigen::MatrixXd> modes;  // Q^T A_k Q for k in t
  Eigen::VectorXd load;                // Q^T f

  int dim() const { return static_cast<int>(load.size()); }
};

ReducedLocalSystem project_local(const AffineOperatorFamily& ops,
                                 const Eigen::VectorXd& anchor, const AnovaIndex& t,
                                 const ReducedBasis& q);

struct ReducedSolution {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd lifted;  // Q * coefficients
};

/// Solve the N_r x N_r projected system at xi_t and lift. A singular reduced
/// matrix raises std::runtime_error with a condition estimate.
ReducedSolution reduced_solve(const ReducedLocalSystem& sys, const ReducedBasis& q,
                              const Eigen::VectorXd& xi_t);

/// Residual indicator tau = ||A(xi^{c,t}) Q u~ - f||_2 / ||f||_2 of a lifted
/// reduced solution against the full local system.
double residual_indicator(const AffineOperatorFamily& ops, const Eigen::VectorXd& anchor,
                          const AnovaIndex& t, const Eigen::VectorXd& lifted,
                          const Eigen::VectorXd& xi_t);

}  // namespace rbanova
