#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "rbanova/grid.hpp"

namespace rbanova {

class KlExpansion;

/// A full finite-element solution on the interior nodes of its grid.
using Snapshot = Eigen::VectorXd;

/// Parametric stiffness A(xi) = A0 + sum_k xi_k A_k plus the load vector,
/// assembled once; every A_k shares the sparsity pattern of A0 so A(xi)
/// can be formed by pure value arithmetic.
struct AffineOperatorFamily {
  UniformGrid grid;
  Eigen::SparseMatrix<double> base;                // A0
  std::vector<Eigen::SparseMatrix<double>> modes;  // A_1..A_M, sqrt(lambda_k) folded in
  Eigen::VectorXd load;                            // f, unit source

  int n_modes() const { return static_cast<int>(modes.size()); }

  /// A(xi) as a sparse matrix (same pattern as base).
  Eigen::SparseMatrix<double> matrix(const Eigen::VectorXd& xi) const;
  /// A(xi) * x without forming A(xi).
  Eigen::VectorXd apply(const Eigen::VectorXd& xi, const Eigen::VectorXd& x) const;
};

/// Assemble the affine family for the diffusion coefficient a(x,xi) given by
/// the KL expansion: bilinear elements, 2x2 Gauss points with the coefficient
/// interpolated bilinearly from nodal values, Dirichlet rows/columns
/// eliminated (interior-only system).
AffineOperatorFamily assemble_affine(const UniformGrid& grid, const KlExpansion& kl);

/// Direct sparse solve of A(xi) u = f. Factorization failure (indefinite
/// operator, i.e. nonpositive permeability) raises std::domain_error
/// carrying the offending xi.
Snapshot solve_full(const AffineOperatorFamily& ops, const Eigen::VectorXd& xi);

/// Reusable solver: the symbolic factorization is analyzed once, each call
/// refactorizes numerically. Not thread-safe; use one instance per thread.
class FullSolver {
 public:
  explicit FullSolver(const AffineOperatorFamily& ops);
  Snapshot solve(const Eigen::VectorXd& xi);

 private:
  const AffineOperatorFamily* ops_;
  Eigen::SparseMatrix<double> work_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

/// Read a solution at sensor locations: exact nodal value when a sensor
/// coincides with a grid node, bilinear interpolation inside the containing
/// cell otherwise. Sensors on the boundary are rejected at SensorSet
/// construction (boundary values are identically zero).
Eigen::VectorXd observe(const Snapshot& u, const UniformGrid& grid, const SensorSet& sensors);

}  // namespace rbanova
