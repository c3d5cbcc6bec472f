#pragma once

#include <Eigen/Core>
#include <compare>
#include <functional>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rbanova/grid.hpp"

namespace rbanova {

/// A sorted subset t of {1..M}; the empty index (order 0) is the anchor term.
class AnovaIndex {
 public:
  AnovaIndex() = default;
  explicit AnovaIndex(std::vector<int> dims);

  int order() const { return static_cast<int>(dims_.size()); }
  bool empty() const { return dims_.empty(); }
  const std::vector<int>& dims() const { return dims_; }
  bool contains(int dim) const;
  bool strict_subset_of(const AnovaIndex& other) const;

  /// All strict subsets, including the empty index (2^order - 1 of them).
  std::vector<AnovaIndex> strict_subsets() const;
  /// All subsets of order order()-1 (the parents in the hierarchy).
  std::vector<AnovaIndex> facets() const;

  /// "1,3" for (1,3); "0" for the empty index.
  std::string to_string() const;
  static AnovaIndex from_string(const std::string& line);

  /// Ordered by (order, lexicographic dims), so parents sort before children.
  std::strong_ordering operator<=>(const AnovaIndex& o) const;
  bool operator==(const AnovaIndex& o) const = default;

 private:
  std::vector<int> dims_;
};

/// Per-order candidate sets J_i, important sets J~_i, and the cumulative
/// active set J = union of the J_i.
struct IndexSets {
  std::vector<std::vector<AnovaIndex>> candidates;  // J_i, index = order
  std::vector<std::vector<AnovaIndex>> important;   // J~_i
  std::set<AnovaIndex> active;                      // J

  bool same_active_set(const IndexSets& o) const { return active == o.active; }
};

void write_index_set(std::ostream& os, const std::set<AnovaIndex>& set);
std::set<AnovaIndex> read_index_set(std::istream& is);

/// xi^{c,t}: coordinate i takes xi_t where i is in t, the anchor c_i elsewhere.
Eigen::VectorXd embed(const Eigen::VectorXd& anchor, const AnovaIndex& t,
                      const Eigen::VectorXd& xi_t);

/// Extract the coordinates of t from a full sample.
Eigen::VectorXd project_one(const Eigen::VectorXd& xi, const AnovaIndex& t);
/// Componentwise extraction for a whole sample set, order preserved.
std::vector<Eigen::VectorXd> project_samples(const std::vector<Eigen::VectorXd>& samples,
                                             const AnovaIndex& t);

/// One term of the anchored decomposition:
///   u_t(x, xi_t) = u(x, c, xi_t) - sum over strict subsets s of u_s(x, xi_s).
/// `local_solution` is u(x, c, xi_t); `child` evaluates u_s at xi_s and must
/// cover every strict subset of t (a missing one raises std::logic_error
/// naming it).
using TermEvaluator = std::function<Eigen::VectorXd(const AnovaIndex& s, const Eigen::VectorXd& xi_s)>;
Eigen::VectorXd term_value(const AnovaIndex& t, const Eigen::VectorXd& xi_t,
                           const Eigen::VectorXd& local_solution,
                           const TermEvaluator& child);

/// Monte Carlo mean of term samples (arithmetic mean of equal-length vectors).
Eigen::VectorXd mc_mean(const std::vector<Eigen::VectorXd>& term_samples);

/// Term means E~(u_t) and relative means gamma~_t.
class TermMeanTable {
 public:
  void set_mean(const AnovaIndex& t, Eigen::VectorXd mean);
  bool has(const AnovaIndex& t) const { return means_.count(t) > 0; }
  const Eigen::VectorXd& mean(const AnovaIndex& t) const;
  void set_gamma(const AnovaIndex& t, double gamma);
  double gamma(const AnovaIndex& t) const;
  const std::map<AnovaIndex, Eigen::VectorXd>& means() const { return means_; }
  const std::map<AnovaIndex, double>& gammas() const { return gammas_; }

  /// sum of E~(u_s) over all stored s with order <= max_order.
  Eigen::VectorXd lower_order_sum(int max_order) const;

 private:
  std::map<AnovaIndex, Eigen::VectorXd> means_;
  std::map<AnovaIndex, double> gammas_;
};

/// gamma~_t = ||E~(u_t)||_{0,D} / ||sum_{s in J*_{|t|-1}} E~(u_s)||_{0,D},
/// both norms the lumped interior L2 quadrature. A vanishing denominator
/// raises std::runtime_error (degenerate model).
double relative_mean(const TermMeanTable& table, const AnovaIndex& t, const UniformGrid& grid);

/// J~_i: candidates whose stored gamma~ is >= tol_anova.
std::vector<AnovaIndex> select_important(const std::vector<AnovaIndex>& candidates,
                                         const TermMeanTable& table, double tol_anova);

/// J_{i+1}: order-(i+1) indices over {1..M} whose every order-i subset is
/// important. Empty input or no closed candidates terminates the ANOVA loop.
std::vector<AnovaIndex> next_order_indices(const std::vector<AnovaIndex>& important_i,
                                           int order, int m);

}  // namespace rbanova
