#include "rbanova/reduced_basis.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rbanova {

ReducedBasis pod(const std::vector<Eigen::VectorXd>& snapshots, double tol_pod,
                 AnovaIndex index) {
  if (snapshots.empty()) throw std::invalid_argument("pod: empty snapshot list");
  const Eigen::Index rows = snapshots.front().size();
  if (static_cast<Eigen::Index>(snapshots.size()) >= rows)
    throw std::invalid_argument("pod: snapshot count must stay below the node count");
  Eigen::MatrixXd s(rows, static_cast<Eigen::Index>(snapshots.size()));
  for (std::size_t j = 0; j < snapshots.size(); ++j) {
    if (snapshots[j].size() != rows) throw std::invalid_argument("pod: snapshot lengths differ");
    s.col(static_cast<Eigen::Index>(j)) = snapshots[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma[0] <= 0.0)
    throw std::runtime_error("pod: all snapshots are zero");
  Eigen::Index keep = 0;
  while (keep < sigma.size() && sigma[keep] / sigma[0] > tol_pod) ++keep;
  ReducedBasis q;
  q.index = std::move(index);
  q.basis = svd.matrixU().leftCols(keep);
  return q;
}

ReducedBasis augment(const ReducedBasis& q, const Eigen::VectorXd& snapshot) {
  const double norm0 = snapshot.norm();
  if (norm0 <= 0.0) throw std::invalid_argument("augment: zero snapshot");
  Eigen::VectorXd v = snapshot;
  // modified Gram-Schmidt with one re-orthogonalization pass
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index k = 0; k < q.basis.cols(); ++k)
      v -= q.basis.col(k).dot(v) * q.basis.col(k);
  const double residual = v.norm();
  if (residual <= 1e-10 * norm0) return q;  // already in span
  ReducedBasis out = q;
  out.basis.conservativeResize(snapshot.size(), q.basis.cols() + 1);
  out.basis.col(q.basis.cols()) = v / residual;
  return out;
}

ReducedLocalSystem project_local(const AffineOperatorFamily& ops, const Eigen::VectorXd& anchor,
                                 const AnovaIndex& t, const ReducedBasis& q) {
  if (anchor.size() != ops.n_modes())
    throw std::invalid_argument("project_local: anchor length != number of modes");
  ReducedLocalSystem sys;
  sys.index = t;
  // anchor folded into the out-of-t part once
  Eigen::MatrixXd aq = ops.base * q.basis;
  for (int k = 0; k < ops.n_modes(); ++k) {
    if (t.contains(k + 1)) continue;
    aq += anchor[k] * (ops.modes[k] * q.basis);
  }
  sys.base = q.basis.transpose() * aq;
  sys.modes.reserve(t.order());
  for (int d : t.dims())
    sys.modes.push_back(q.basis.transpose() * (ops.modes[d - 1] * q.basis));
  sys.load = q.basis.transpose() * ops.load;
  return sys;
}

ReducedSolution reduced_solve(const ReducedLocalSystem& sys, const ReducedBasis& q,
                              const Eigen::VectorXd& xi_t) {
  if (xi_t.size() != static_cast<Eigen::Index>(sys.modes.size()))
    throw std::invalid_argument("reduced_solve: xi_t length != |t|");
  Eigen::MatrixXd r = sys.base;
  for (std::size_t j = 0; j < sys.modes.size(); ++j) r += xi_t[j] * sys.modes[j];
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "reduced system for term " << sys.index.to_string()
        << " is not SPD: eigenvalue range [" << es.eigenvalues().minCoeff() << ", "
        << es.eigenvalues().maxCoeff() << "]";
    throw std::runtime_error(msg.str());
  }
  ReducedSolution sol;
  sol.coefficients = llt.solve(sys.load);
  sol.lifted = q.basis * sol.coefficients;
  return sol;
}

double residual_indicator(const AffineOperatorFamily& ops, const Eigen::VectorXd& anchor,
                          const AnovaIndex& t, const Eigen::VectorXd& lifted,
                          const Eigen::VectorXd& xi_t) {
  const double fnorm = ops.load.norm();
  if (fnorm <= 0.0) throw std::logic_error("residual_indicator: zero load vector");
  const Eigen::VectorXd xi = embed(anchor, t, xi_t);
  return (ops.apply(xi, lifted) - ops.load).norm() / fnorm;
}

}  // namespace rbanova
