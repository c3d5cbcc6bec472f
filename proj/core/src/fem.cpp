#include "rbanova/fem.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rbanova/io.hpp"
#include "rbanova/random_field.hpp"

namespace rbanova {

namespace {

// Reference-element data for bilinear quads: corner signs and the 2x2 Gauss
// points on [-1,1]^2. Local corner order (0,0),(1,0),(1,1),(0,1).
constexpr std::array<std::array<double, 2>, 4> kCorners = {{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};

struct GaussPoint {
  double eta, zeta;
  std::array<double, 4> shape;
  std::array<std::array<double, 2>, 4> grad;  // reference gradients
};

std::array<GaussPoint, 4> gauss_points() {
  const double g = 1.0 / std::sqrt(3.0);
  std::array<GaussPoint, 4> pts{};
  const std::array<std::array<double, 2>, 4> locs = {{{-g, -g}, {g, -g}, {g, g}, {-g, g}}};
  for (int q = 0; q < 4; ++q) {
    const double eta = locs[q][0], zeta = locs[q][1];
    pts[q].eta = eta;
    pts[q].zeta = zeta;
    for (int a = 0; a < 4; ++a) {
      const double cx = kCorners[a][0], cy = kCorners[a][1];
      pts[q].shape[a] = 0.25 * (1 + cx * eta) * (1 + cy * zeta);
      pts[q].grad[a] = {0.25 * cx * (1 + cy * zeta), 0.25 * cy * (1 + cx * eta)};
    }
  }
  return pts;
}

// Interior-interior stiffness for a nodal coefficient field. The (h/2)^2
// element measure cancels against the (2/h)^2 gradient scaling, so element
// contributions are a(x_g) * grad_a . grad_b in reference coordinates.
Eigen::SparseMatrix<double> assemble_stiffness(const UniformGrid& grid,
                                               const Eigen::VectorXd& coef_nodal) {
  const int n = grid.n();
  const auto gps = gauss_points();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * n * 16);
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      const std::array<int, 4> gx = {ex, ex + 1, ex + 1, ex};
      const std::array<int, 4> gy = {ey, ey, ey + 1, ey + 1};
      std::array<double, 4> a_nodal{};
      for (int a = 0; a < 4; ++a) a_nodal[a] = coef_nodal[grid.node_id(gx[a], gy[a])];
      std::array<std::array<double, 4>, 4> ke{};
      for (const auto& gp : gps) {
        double a_g = 0.0;
        for (int a = 0; a < 4; ++a) a_g += gp.shape[a] * a_nodal[a];
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            ke[a][b] += a_g * (gp.grad[a][0] * gp.grad[b][0] + gp.grad[a][1] * gp.grad[b][1]);
      }
      for (int a = 0; a < 4; ++a) {
        if (grid.is_boundary(gx[a], gy[a])) continue;
        const int ia = grid.interior_id(gx[a], gy[a]);
        for (int b = 0; b < 4; ++b) {
          if (grid.is_boundary(gx[b], gy[b])) continue;
          trips.emplace_back(ia, grid.interior_id(gx[b], gy[b]), ke[a][b]);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> m(grid.interior_count(), grid.interior_count());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

void check_same_pattern(const Eigen::SparseMatrix<double>& a,
                        const Eigen::SparseMatrix<double>& b) {
  if (a.nonZeros() != b.nonZeros())
    throw std::logic_error("affine operator family: sparsity patterns differ");
}

}  // namespace

Eigen::SparseMatrix<double> AffineOperatorFamily::matrix(const Eigen::VectorXd& xi) const {
  if (xi.size() != n_modes())
    throw std::invalid_argument("AffineOperatorFamily::matrix: xi has wrong length");
  Eigen::SparseMatrix<double> a = base;
  double* va = a.valuePtr();
  const auto nnz = a.nonZeros();
  for (int k = 0; k < n_modes(); ++k) {
    check_same_pattern(a, modes[k]);
    const double* vk = modes[k].valuePtr();
    const double c = xi[k];
    for (Eigen::Index i = 0; i < nnz; ++i) va[i] += c * vk[i];
  }
  return a;
}

Eigen::VectorXd AffineOperatorFamily::apply(const Eigen::VectorXd& xi,
                                            const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = base * x;
  for (int k = 0; k < n_modes(); ++k) y += xi[k] * (modes[k] * x);
  return y;
}

AffineOperatorFamily assemble_affine(const UniformGrid& grid, const KlExpansion& kl) {
  if (kl.mean.size() != grid.total_nodes())
    throw std::invalid_argument("assemble_affine: KL nodal vectors do not match the grid");
  if (kl.modes.cols() > 0 && kl.modes.rows() != grid.total_nodes())
    throw std::invalid_argument("assemble_affine: KL mode length mismatch");
  if (!kl.mean.allFinite() || !kl.modes.allFinite())
    throw std::invalid_argument("assemble_affine: KL data not finite");

  AffineOperatorFamily ops;
  ops.grid = grid;
  ops.base = assemble_stiffness(grid, kl.mean);
  ops.modes.reserve(kl.n_modes());
  for (int k = 0; k < kl.n_modes(); ++k) {
    const Eigen::VectorXd scaled = std::sqrt(kl.eigenvalues[k]) * kl.modes.col(k);
    ops.modes.push_back(assemble_stiffness(grid, scaled));
  }

  // unit source: f_i = integral of the hat function = h^2 on interior nodes
  const double h2 = grid.spacing() * grid.spacing();
  ops.load = Eigen::VectorXd::Constant(grid.interior_count(), h2);
  return ops;
}

FullSolver::FullSolver(const AffineOperatorFamily& ops) : ops_(&ops) {
  work_ = ops.base;
  llt_.analyzePattern(work_);
}

Snapshot FullSolver::solve(const Eigen::VectorXd& xi) {
  if (xi.size() != ops_->n_modes())
    throw std::invalid_argument("FullSolver::solve: xi has wrong length");
  double* vw = work_.valuePtr();
  const double* vb = ops_->base.valuePtr();
  const auto nnz = work_.nonZeros();
  for (Eigen::Index i = 0; i < nnz; ++i) vw[i] = vb[i];
  for (int k = 0; k < ops_->n_modes(); ++k) {
    const double* vk = ops_->modes[k].valuePtr();
    const double c = xi[k];
    for (Eigen::Index i = 0; i < nnz; ++i) vw[i] += c * vk[i];
  }
  llt_.factorize(work_);
  if (llt_.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "stiffness factorization failed (operator not SPD) at xi = [";
    for (int k = 0; k < xi.size(); ++k) msg << (k ? ", " : "") << format_full(xi[k]);
    msg << "]";
    throw std::domain_error(msg.str());
  }
  return llt_.solve(ops_->load);
}

Snapshot solve_full(const AffineOperatorFamily& ops, const Eigen::VectorXd& xi) {
  FullSolver solver(ops);
  return solver.solve(xi);
}

Eigen::VectorXd observe(const Snapshot& u, const UniformGrid& grid, const SensorSet& sensors) {
  if (u.size() != grid.interior_count())
    throw std::invalid_argument("observe: snapshot length does not match the grid");
  const int n = grid.n();
  const double h = grid.spacing();
  auto value_at = [&](int ix, int iy) -> double {
    return grid.is_boundary(ix, iy) ? 0.0 : u[grid.interior_id(ix, iy)];
  };
  Eigen::VectorXd out(sensors.size());
  for (int s = 0; s < sensors.size(); ++s) {
    const double x = sensors.x(s), y = sensors.y(s);
    const double fx = x / h, fy = y / h;
    const int ix = static_cast<int>(std::lround(fx));
    const int iy = static_cast<int>(std::lround(fy));
    constexpr double kNodeTol = 1e-12;
    if (std::abs(fx - ix) < kNodeTol && std::abs(fy - iy) < kNodeTol) {
      out[s] = value_at(ix, iy);  // exact nodal read
      continue;
    }
    int ex = std::min(static_cast<int>(std::floor(fx)), n - 1);
    int ey = std::min(static_cast<int>(std::floor(fy)), n - 1);
    const double sx = fx - ex, sy = fy - ey;
    out[s] = (1 - sx) * (1 - sy) * value_at(ex, ey) + sx * (1 - sy) * value_at(ex + 1, ey) +
             sx * sy * value_at(ex + 1, ey + 1) + (1 - sx) * sy * value_at(ex, ey + 1);
  }
  return out;
}

}  // namespace rbanova
