#include "rbanova/random_field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rbanova/io.hpp"

namespace rbanova {

namespace {

// Gauss-Legendre nodes/weights on [-1,1], order 12: plenty for the kernel
// element integrals away from the diagonal; the |x-y| kink inside diagonal
// element pairs costs a little accuracy there but eigenvalue errors stay
// well below the truncation decisions (checked against the transcendental
// solution in the tests).
constexpr int kGaussOrder = 12;
constexpr double kGx[kGaussOrder] = {
    -0.9815606342467192, -0.9041172563704749, -0.7699026741943047, -0.5873179542866175,
    -0.3678314989981802, -0.1252334085114689, 0.1252334085114689,  0.3678314989981802,
    0.5873179542866175,  0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
constexpr double kGw[kGaussOrder] = {
    0.04717533638651183, 0.10693932599531843, 0.16007832854334622, 0.20316742672306592,
    0.2334925365383548,  0.2491470458134028,  0.2491470458134028,  0.2334925365383548,
    0.20316742672306592, 0.16007832854334622, 0.10693932599531843, 0.04717533638651183};

void check_validated(int n_nodes) {
  if (n_nodes < 3) throw std::invalid_argument("eigenpairs_1d: need at least 3 nodes");
}

}  // namespace

double mass_inner_1d(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::Index n = u.size();
  if (v.size() != n || n < 2) throw std::invalid_argument("mass_inner_1d: bad lengths");
  const double h = 1.0 / static_cast<double>(n - 1);
  // tridiagonal P1 mass: h/6 * [1 4 1], halved rows at the ends
  double acc = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    acc += (h / 6.0) *
           (2.0 * u[i] * v[i] + u[i] * v[i + 1] + u[i + 1] * v[i] + 2.0 * u[i + 1] * v[i + 1]);
  }
  return acc;
}

double mass_inner_2d(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                     const UniformGrid& grid) {
  const int nn = grid.nodes_per_side();
  if (u.size() != grid.total_nodes() || v.size() != grid.total_nodes())
    throw std::invalid_argument("mass_inner_2d: length mismatch");
  // the bilinear mass matrix is the tensor product of the 1D P1 mass:
  // apply M1 along x, then along y, then contract against u
  Eigen::MatrixXd um = Eigen::Map<const Eigen::MatrixXd>(u.data(), nn, nn);  // x-index fastest
  Eigen::MatrixXd vm = Eigen::Map<const Eigen::MatrixXd>(v.data(), nn, nn);
  const double h = grid.spacing();
  auto apply_m1 = [h](const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, a.cols());
    for (int i = 0; i + 1 < n; ++i) {
      r.row(i) += (h / 6.0) * (2.0 * a.row(i) + a.row(i + 1));
      r.row(i + 1) += (h / 6.0) * (a.row(i) + 2.0 * a.row(i + 1));
    }
    return r;
  };
  Eigen::MatrixXd t = apply_m1(vm);         // M1 along x
  t = apply_m1(t.transpose()).transpose();  // M1 along y
  return (um.array() * t.array()).sum();
}

std::vector<Eigenpair1d> eigenpairs_1d(const ExponentialCovariance& cov, int n_nodes) {
  check_validated(n_nodes);
  if (!(cov.alpha > 0.0) || !(cov.sigma > 0.0))
    throw std::invalid_argument("ExponentialCovariance: sigma and alpha must be positive");

  const int n = n_nodes;
  const int nel = n - 1;
  const double h = 1.0 / nel;
  const int npts = nel * kGaussOrder;

  // quadrature points, weights, and hat-function values
  Eigen::VectorXd x(npts), w(npts);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(npts, n);
  for (int e = 0; e < nel; ++e) {
    for (int q = 0; q < kGaussOrder; ++q) {
      const int p = e * kGaussOrder + q;
      const double s = 0.5 * (kGx[q] + 1.0);
      x[p] = (e + s) * h;
      w[p] = 0.5 * h * kGw[q];
      phi(p, e) = 1.0 - s;
      phi(p, e + 1) = s;
    }
  }

  // K = (W phi)^T k (W phi) with the unit-variance kernel
  Eigen::MatrixXd kq(npts, npts);
  for (int i = 0; i < npts; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = std::exp(-std::abs(x[i] - x[j]) / cov.alpha);
      kq(i, j) = v;
      kq(j, i) = v;
    }
  Eigen::MatrixXd wphi = w.asDiagonal() * phi;
  Eigen::MatrixXd K = wphi.transpose() * (kq * wphi);
  K = 0.5 * (K + K.transpose());  // symmetrize rounding

  // consistent P1 mass matrix
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < nel; ++e) {
    M(e, e) += h / 3.0;
    M(e + 1, e + 1) += h / 3.0;
    M(e, e + 1) += h / 6.0;
    M(e + 1, e) += h / 6.0;
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigenpairs_1d: generalized eigensolve failed");

  std::vector<Eigenpair1d> pairs(n);
  for (int k = 0; k < n; ++k) {
    const int src = n - 1 - k;  // Eigen returns ascending
    Eigenpair1d p;
    p.lambda = std::max(es.eigenvalues()[src], 0.0);
    p.phi = es.eigenvectors().col(src);
    // deterministic sign: largest-magnitude entry positive
    Eigen::Index argmax = 0;
    p.phi.cwiseAbs().maxCoeff(&argmax);
    if (p.phi[argmax] < 0.0) p.phi = -p.phi;
    pairs[k] = std::move(p);
  }
  return pairs;
}

KlExpansion build_kl(const ExponentialCovariance& cov, const UniformGrid& grid, double fraction,
                     double mean_value) {
  return build_kl(cov, grid, fraction,
                  Eigen::VectorXd::Constant(grid.total_nodes(), mean_value));
}

KlExpansion build_kl(const ExponentialCovariance& cov, const UniformGrid& grid, double fraction,
                     const Eigen::VectorXd& mean_field) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("build_kl: fraction must lie in (0,1]");
  if (mean_field.size() != grid.total_nodes())
    throw std::invalid_argument("build_kl: mean field length mismatch");

  const int nn = grid.nodes_per_side();
  const auto pairs = eigenpairs_1d(cov, nn);
  const double sigma2 = cov.sigma * cov.sigma;

  struct Tensor {
    double lambda;
    int i, j;
  };
  std::vector<Tensor> tensor;
  tensor.reserve(static_cast<std::size_t>(nn) * nn);
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j)
      tensor.push_back({sigma2 * pairs[i].lambda * pairs[j].lambda, i, j});
  std::sort(tensor.begin(), tensor.end(), [](const Tensor& a, const Tensor& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (a.i != b.i) return a.i < b.i;  // lexicographic tie-break for degenerate pairs
    return a.j < b.j;
  });

  const double threshold = fraction * sigma2;
  double cum = 0.0;
  int m = static_cast<int>(tensor.size());
  for (std::size_t k = 0; k < tensor.size(); ++k) {
    cum += tensor[k].lambda;
    if (cum >= threshold) {
      m = static_cast<int>(k + 1);
      break;
    }
  }

  KlExpansion kl;
  kl.grid = grid;
  kl.mean = mean_field;
  kl.eigenvalues.resize(m);
  kl.modes.resize(grid.total_nodes(), m);
  double captured = 0.0;
  for (int k = 0; k < m; ++k) {
    const auto& t = tensor[static_cast<std::size_t>(k)];
    kl.eigenvalues[k] = t.lambda;
    captured += t.lambda;
    // mode (i,j): phi_i(x) phi_j(y)
    const auto& px = pairs[t.i].phi;
    const auto& py = pairs[t.j].phi;
    for (int iy = 0; iy < nn; ++iy)
      for (int ix = 0; ix < nn; ++ix)
        kl.modes(grid.node_id(ix, iy), k) = px[ix] * py[iy];
  }
  kl.variance_fraction_captured = captured / sigma2;
  return kl;
}

Eigen::VectorXd evaluate_field_unchecked(const KlExpansion& kl, const Eigen::VectorXd& xi) {
  if (xi.size() != kl.n_modes())
    throw std::invalid_argument("evaluate_field: xi has wrong length");
  Eigen::VectorXd field = kl.mean;
  for (int k = 0; k < kl.n_modes(); ++k)
    field += std::sqrt(kl.eigenvalues[k]) * xi[k] * kl.modes.col(k);
  return field;
}

Eigen::VectorXd evaluate_field(const KlExpansion& kl, const Eigen::VectorXd& xi) {
  Eigen::VectorXd field = evaluate_field_unchecked(kl, xi);
  Eigen::Index argmin = 0;
  const double mn = field.minCoeff(&argmin);
  if (mn <= 0.0) {
    const int nn = kl.grid.nodes_per_side();
    const int ix = static_cast<int>(argmin) % nn;
    const int iy = static_cast<int>(argmin) / nn;
    std::ostringstream msg;
    msg << "permeability field not positive: min " << format_full(mn) << " at node (x="
        << format_full(kl.grid.node_x(ix)) << ", y=" << format_full(kl.grid.node_y(iy)) << ")";
    throw std::domain_error(msg.str());
  }
  return field;
}

}  // namespace rbanova
