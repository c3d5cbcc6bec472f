#include "rbanova/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace rbanova {

UniformGrid::UniformGrid(int n_cells_per_side) : n_(n_cells_per_side) {
  if (n_ < 2) throw std::invalid_argument("UniformGrid: need at least 2 cells per side");
}

Eigen::VectorXd UniformGrid::with_boundary(const Eigen::VectorXd& interior) const {
  if (interior.size() != interior_count())
    throw std::invalid_argument("with_boundary: interior vector length mismatch");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(total_nodes());
  for (int iy = 1; iy < n_; ++iy)
    for (int ix = 1; ix < n_; ++ix)
      full[node_id(ix, iy)] = interior[interior_id(ix, iy)];
  return full;
}

double l2_norm_interior(const Eigen::VectorXd& interior, const UniformGrid& grid) {
  if (interior.size() != grid.interior_count())
    throw std::invalid_argument("l2_norm_interior: length mismatch");
  const double h = grid.spacing();
  return std::sqrt(h * h * interior.squaredNorm());
}

double l2_norm_field(const Eigen::VectorXd& nodal, const UniformGrid& grid) {
  if (nodal.size() != grid.total_nodes())
    throw std::invalid_argument("l2_norm_field: length mismatch");
  const int nn = grid.nodes_per_side();
  const double h = grid.spacing();
  double acc = 0.0;
  for (int iy = 0; iy < nn; ++iy) {
    const double wy = (iy == 0 || iy == nn - 1) ? 0.5 : 1.0;
    for (int ix = 0; ix < nn; ++ix) {
      const double wx = (ix == 0 || ix == nn - 1) ? 0.5 : 1.0;
      const double v = nodal[grid.node_id(ix, iy)];
      acc += wx * wy * v * v;
    }
  }
  return std::sqrt(h * h * acc);
}

SensorSet::SensorSet(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size())
    throw std::invalid_argument("SensorSet: coordinate lists differ in length");
  if (xs_.empty()) throw std::invalid_argument("SensorSet: no sensors");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!(xs_[i] > 0.0 && xs_[i] < 1.0 && ys_[i] > 0.0 && ys_[i] < 1.0))
      throw std::invalid_argument(
          "SensorSet: sensors must be strictly interior (boundary values are identically 0)");
  }
}

SensorSet SensorSet::tensor_grid(int per_side) {
  if (per_side < 1) throw std::invalid_argument("SensorSet: per_side must be positive");
  std::vector<double> xs, ys;
  const double step = 1.0 / (per_side + 1);
  for (int j = 1; j <= per_side; ++j)
    for (int i = 1; i <= per_side; ++i) {
      xs.push_back(i * step);
      ys.push_back(j * step);
    }
  return SensorSet(std::move(xs), std::move(ys));
}

}  // namespace rbanova
