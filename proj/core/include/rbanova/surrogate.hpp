#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <vector>

#include "rbanova/anova.hpp"
#include "rbanova/cost.hpp"
#include "rbanova/fem.hpp"
#include "rbanova/random_field.hpp"
#include "rbanova/reduced_basis.hpp"

namespace rbanova {

struct SurrogateTolerances {
  double anova = 1e-4;
  double rb = 1e-4;
  double pod = 1e-4;
};

struct LocalModel {
  ReducedBasis basis;
  ReducedLocalSystem system;
};

/// The RB-ANOVA model data: anchor c, anchor snapshot u^h(x,c), active index
/// set J, and a reduced basis plus projected local system per t in J\{0}.
class SurrogateModel {
 public:
  Eigen::VectorXd anchor;
  Eigen::VectorXd anchor_snapshot;  // interior nodes
  IndexSets indices;
  std::map<AnovaIndex, LocalModel> locals;
  SurrogateTolerances tol;
  int order_cap = 3;
  UniformGrid grid;
  KlExpansion kl;
  TermMeanTable means;  // build diagnostics (gamma~ values)

  int dim() const { return static_cast<int>(anchor.size()); }

  /// u^r_J(x, xi) on the interior nodes; each local reduced solve bills
  /// N_r/N_h to the ledger when one is given.
  Eigen::VectorXd predict_field(const Eigen::VectorXd& xi, CostLedger* ledger = nullptr) const;

  /// G^r_J(xi): predict_field followed by the observation operator.
  Eigen::VectorXd predict(const Eigen::VectorXd& xi, const SensorSet& sensors,
                          CostLedger* ledger = nullptr) const;

  /// Single decomposition term u^r_t(x, xi_t) (children evaluated with their
  /// own reduced models and memoized); mostly for verification.
  Eigen::VectorXd term(const AnovaIndex& t, const Eigen::VectorXd& xi_t) const;

  /// Residual indicators of the final model at the given training samples,
  /// keyed by term; max over samples per term.
  std::map<AnovaIndex, double> certify(const AffineOperatorFamily& ops,
                                       const std::vector<Eigen::VectorXd>& samples) const;
};

/// Algorithm: anchor = sample mean, zeroth-order snapshot, then per order
/// hierarchical POD initialization, single-pass greedy training over the
/// projected samples (full solve + augmentation when tau >= tol_rb), Monte
/// Carlo term means, relative-mean screening, and subset-closed index
/// generation until no candidates remain or order_cap is hit. Every full
/// solve bills one unit, every reduced solve N_r/N_h.
SurrogateModel build_surrogate(const std::vector<Eigen::VectorXd>& samples,
                               const AffineOperatorFamily& ops, const KlExpansion& kl,
                               const SurrogateTolerances& tol, int order_cap,
                               CostLedger& ledger);

/// Model container: a directory holding a plain-text manifest plus one
/// binary float64 file per basis matrix, the anchor snapshot, and the KL
/// data. Round trips are bit-exact; load verifies per-file checksums.
void save_model(const SurrogateModel& model, const std::filesystem::path& dir);
SurrogateModel load_model(const std::filesystem::path& dir);

}  // namespace rbanova
