#include "rbanova/anova.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rbanova {

AnovaIndex::AnovaIndex(std::vector<int> dims) : dims_(std::move(dims)) {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) throw std::invalid_argument("AnovaIndex: dimensions are 1-based");
    if (i > 0 && dims_[i] <= dims_[i - 1])
      throw std::invalid_argument("AnovaIndex: dimensions must be strictly ascending");
  }
}

bool AnovaIndex::contains(int dim) const {
  return std::binary_search(dims_.begin(), dims_.end(), dim);
}

bool AnovaIndex::strict_subset_of(const AnovaIndex& other) const {
  if (order() >= other.order()) return false;
  return std::includes(other.dims_.begin(), other.dims_.end(), dims_.begin(), dims_.end());
}

std::vector<AnovaIndex> AnovaIndex::strict_subsets() const {
  const int k = order();
  std::vector<AnovaIndex> out;
  out.reserve((1u << k) - 1);
  for (unsigned mask = 0; mask + 1 < (1u << k); ++mask) {
    std::vector<int> dims;
    for (int b = 0; b < k; ++b)
      if (mask & (1u << b)) dims.push_back(dims_[b]);
    out.emplace_back(std::move(dims));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AnovaIndex> AnovaIndex::facets() const {
  std::vector<AnovaIndex> out;
  for (int drop = 0; drop < order(); ++drop) {
    std::vector<int> dims;
    for (int i = 0; i < order(); ++i)
      if (i != drop) dims.push_back(dims_[i]);
    out.emplace_back(std::move(dims));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string AnovaIndex::to_string() const {
  if (dims_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  return os.str();
}

AnovaIndex AnovaIndex::from_string(const std::string& line) {
  if (line == "0") return AnovaIndex{};
  std::vector<int> dims;
  std::istringstream is(line);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("AnovaIndex: malformed line '" + line + "'");
    dims.push_back(std::stoi(tok));
  }
  return AnovaIndex(std::move(dims));
}

std::strong_ordering AnovaIndex::operator<=>(const AnovaIndex& o) const {
  if (auto c = order() <=> o.order(); c != 0) return c;
  return dims_ <=> o.dims_;
}

void write_index_set(std::ostream& os, const std::set<AnovaIndex>& set) {
  for (const auto& t : set) os << t.to_string() << '\n';
}

std::set<AnovaIndex> read_index_set(std::istream& is) {
  std::set<AnovaIndex> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.insert(AnovaIndex::from_string(line));
  }
  return out;
}

Eigen::VectorXd embed(const Eigen::VectorXd& anchor, const AnovaIndex& t,
                      const Eigen::VectorXd& xi_t) {
  if (xi_t.size() != t.order()) throw std::invalid_argument("embed: xi_t length != |t|");
  Eigen::VectorXd xi = anchor;
  const auto& dims = t.dims();
  for (int i = 0; i < t.order(); ++i) {
    const int d = dims[i];
    if (d < 1 || d > anchor.size()) throw std::logic_error("embed: index dimension out of range");
    xi[d - 1] = xi_t[i];
  }
  return xi;
}

Eigen::VectorXd project_one(const Eigen::VectorXd& xi, const AnovaIndex& t) {
  Eigen::VectorXd out(t.order());
  const auto& dims = t.dims();
  for (int i = 0; i < t.order(); ++i) {
    if (dims[i] < 1 || dims[i] > xi.size())
      throw std::logic_error("project_one: index dimension out of range");
    out[i] = xi[dims[i] - 1];
  }
  return out;
}

std::vector<Eigen::VectorXd> project_samples(const std::vector<Eigen::VectorXd>& samples,
                                             const AnovaIndex& t) {
  if (samples.empty()) throw std::invalid_argument("project_samples: empty sample set");
  std::vector<Eigen::VectorXd> out;
  out.reserve(samples.size());
  for (const auto& xi : samples) out.push_back(project_one(xi, t));
  return out;
}

Eigen::VectorXd term_value(const AnovaIndex& t, const Eigen::VectorXd& xi_t,
                           const Eigen::VectorXd& local_solution, const TermEvaluator& child) {
  Eigen::VectorXd value = local_solution;
  for (const auto& s : t.strict_subsets()) {
    // xi_s extracted by the position of s's dimensions within t
    Eigen::VectorXd xi_s(s.order());
    const auto& sd = s.dims();
    const auto& td = t.dims();
    for (int i = 0; i < s.order(); ++i) {
      const auto it = std::lower_bound(td.begin(), td.end(), sd[i]);
      xi_s[i] = xi_t[static_cast<int>(it - td.begin())];
    }
    if (!child) throw std::logic_error("term_value: no child evaluator provided");
    value -= child(s, xi_s);
  }
  return value;
}

Eigen::VectorXd mc_mean(const std::vector<Eigen::VectorXd>& term_samples) {
  if (term_samples.empty()) throw std::invalid_argument("mc_mean: empty sample list");
  Eigen::VectorXd acc = term_samples.front();
  for (std::size_t j = 1; j < term_samples.size(); ++j) {
    if (term_samples[j].size() != acc.size())
      throw std::invalid_argument("mc_mean: sample lengths differ");
    acc += term_samples[j];
  }
  return acc / static_cast<double>(term_samples.size());
}

void TermMeanTable::set_mean(const AnovaIndex& t, Eigen::VectorXd mean) {
  means_[t] = std::move(mean);
}

const Eigen::VectorXd& TermMeanTable::mean(const AnovaIndex& t) const {
  const auto it = means_.find(t);
  if (it == means_.end())
    throw std::logic_error("TermMeanTable: no mean stored for " + t.to_string());
  return it->second;
}

void TermMeanTable::set_gamma(const AnovaIndex& t, double gamma) {
  if (gamma < 0.0) throw std::logic_error("TermMeanTable: negative relative mean");
  gammas_[t] = gamma;
}

double TermMeanTable::gamma(const AnovaIndex& t) const {
  const auto it = gammas_.find(t);
  if (it == gammas_.end())
    throw std::logic_error("TermMeanTable: no relative mean stored for " + t.to_string());
  return it->second;
}

Eigen::VectorXd TermMeanTable::lower_order_sum(int max_order) const {
  Eigen::VectorXd acc;
  for (const auto& [s, mean] : means_) {
    if (s.order() > max_order) continue;
    if (acc.size() == 0)
      acc = mean;
    else
      acc += mean;
  }
  if (acc.size() == 0) throw std::logic_error("TermMeanTable: no lower-order means stored");
  return acc;
}

double relative_mean(const TermMeanTable& table, const AnovaIndex& t, const UniformGrid& grid) {
  const Eigen::VectorXd denom_sum = table.lower_order_sum(t.order() - 1);
  const double denom = l2_norm_interior(denom_sum, grid);
  if (denom <= 0.0)
    throw std::runtime_error(
        "relative_mean: lower-order mean sum has zero norm (degenerate model)");
  return l2_norm_interior(table.mean(t), grid) / denom;
}

std::vector<AnovaIndex> select_important(const std::vector<AnovaIndex>& candidates,
                                         const TermMeanTable& table, double tol_anova) {
  std::vector<AnovaIndex> kept;
  for (const auto& t : candidates)
    if (table.gamma(t) >= tol_anova) kept.push_back(t);
  return kept;
}

std::vector<AnovaIndex> next_order_indices(const std::vector<AnovaIndex>& important_i, int order,
                                           int m) {
  std::set<AnovaIndex> member(important_i.begin(), important_i.end());
  for (const auto& t : important_i)
    if (t.order() != order) throw std::invalid_argument("next_order_indices: mixed orders");

  // candidates: unions of pairs sharing all but the last dimension, then the
  // full facet check (apriori-style generation)
  std::set<AnovaIndex> result;
  for (auto it1 = important_i.begin(); it1 != important_i.end(); ++it1) {
    for (auto it2 = std::next(it1); it2 != important_i.end(); ++it2) {
      std::vector<int> merged;
      std::set_union(it1->dims().begin(), it1->dims().end(), it2->dims().begin(),
                     it2->dims().end(), std::back_inserter(merged));
      if (static_cast<int>(merged.size()) != order + 1) continue;
      AnovaIndex cand(std::move(merged));
      bool closed = true;
      for (const auto& facet : cand.facets())
        if (!member.count(facet)) {
          closed = false;
          break;
        }
      if (closed) result.insert(std::move(cand));
    }
  }
  // order 0 -> order 1: the pair loop above never fires for the empty index
  if (order == 0 && !important_i.empty()) {
    for (int d = 1; d <= m; ++d) result.insert(AnovaIndex({d}));
  }
  return {result.begin(), result.end()};
}

}  // namespace rbanova
