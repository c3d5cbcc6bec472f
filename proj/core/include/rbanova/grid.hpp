#pragma once

#include <Eigen/Core>
#include <vector>

namespace rbanova {

/// Uniform bilinear-element grid on the unit square D = (0,1)^2.
/// Nodes are laid out row-major with x fastest; homogeneous Dirichlet
/// boundaries mean solution vectors live on interior nodes only.
class UniformGrid {
 public:
  explicit UniformGrid(int n_cells_per_side);
  UniformGrid() = default;

  int n() const { return n_; }
  double spacing() const { return 1.0 / n_; }
  int nodes_per_side() const { return n_ + 1; }
  int total_nodes() const { return (n_ + 1) * (n_ + 1); }
  int interior_per_side() const { return n_ - 1; }
  int interior_count() const { return (n_ - 1) * (n_ - 1); }

  int node_id(int ix, int iy) const { return iy * (n_ + 1) + ix; }
  bool is_boundary(int ix, int iy) const {
    return ix == 0 || iy == 0 || ix == n_ || iy == n_;
  }
  int interior_id(int ix, int iy) const {
    return (iy - 1) * (n_ - 1) + (ix - 1);
  }
  double node_x(int ix) const { return ix * spacing(); }
  double node_y(int iy) const { return iy * spacing(); }

  /// Expand an interior-node vector to all (n+1)^2 nodes with zero boundary.
  Eigen::VectorXd with_boundary(const Eigen::VectorXd& interior) const;

  bool operator==(const UniformGrid& o) const { return n_ == o.n_; }

 private:
  int n_ = 0;
};

/// L2(D) norm of a solution-type vector (interior nodes, zero on the
/// boundary): lumped quadrature with weight h^2 per interior node.
double l2_norm_interior(const Eigen::VectorXd& interior, const UniformGrid& grid);

/// L2(D) norm of a full-grid nodal field: tensor trapezoidal weights,
/// so the constant 1 has norm exactly 1.
double l2_norm_field(const Eigen::VectorXd& nodal, const UniformGrid& grid);

/// Sensor locations, strictly interior to D.
class SensorSet {
 public:
  SensorSet(std::vector<double> xs, std::vector<double> ys);

  /// Tensor grid x_i = y_i = i/(per_side+1), i = 1..per_side.
  static SensorSet tensor_grid(int per_side);

  int size() const { return static_cast<int>(xs_.size()); }
  double x(int i) const { return xs_[i]; }
  double y(int i) const { return ys_[i]; }

 private:
  std::vector<double> xs_, ys_;
};

}  // namespace rbanova
