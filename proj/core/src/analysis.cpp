#include "rbanova/analysis.hpp"

#include <stdexcept>

namespace rbanova {

FieldEstimate field_moments(const Chain& chain, const KlExpansion& kl) {
  if (chain.states.empty()) throw std::invalid_argument("field_moments: empty chain");
  FieldEstimate est;
  est.mean = Eigen::VectorXd::Zero(kl.grid.total_nodes());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(kl.grid.total_nodes());
  long k = 0;
  for (const auto& xi : chain.states) {
    const Eigen::VectorXd field = evaluate_field_unchecked(kl, xi);
    ++k;
    const Eigen::VectorXd delta = field - est.mean;
    est.mean += delta / static_cast<double>(k);
    m2 += delta.cwiseProduct(field - est.mean);
  }
  est.variance = m2 / static_cast<double>(k);  // population variance
  est.n_samples = k;
  return est;
}

FieldEstimate field_moments_two_pass(const Chain& chain, const KlExpansion& kl) {
  if (chain.states.empty()) throw std::invalid_argument("field_moments: empty chain");
  const double n = static_cast<double>(chain.states.size());
  FieldEstimate est;
  est.mean = Eigen::VectorXd::Zero(kl.grid.total_nodes());
  for (const auto& xi : chain.states) est.mean += evaluate_field_unchecked(kl, xi);
  est.mean /= n;
  est.variance = Eigen::VectorXd::Zero(kl.grid.total_nodes());
  for (const auto& xi : chain.states) {
    const Eigen::VectorXd d = evaluate_field_unchecked(kl, xi) - est.mean;
    est.variance += d.cwiseProduct(d);
  }
  est.variance /= n;
  est.n_samples = chain.length();
  return est;
}

Eigen::VectorXd mean_field(const Chain& chain, const KlExpansion& kl) {
  return field_moments(chain, kl).mean;
}

Eigen::VectorXd variance_field(const Chain& chain, const KlExpansion& kl) {
  return field_moments(chain, kl).variance;
}

double error_vs_actual(const Eigen::VectorXd& estimate_mean, const Eigen::VectorXd& actual,
                       const UniformGrid& grid) {
  const double denom = l2_norm_field(actual, grid);
  if (denom <= 0.0) throw std::invalid_argument("error_vs_actual: reference has zero norm");
  return l2_norm_field(estimate_mean - actual, grid) / denom;
}

std::pair<double, double> error_vs_reference(const FieldEstimate& estimate,
                                             const FieldEstimate& reference,
                                             const UniformGrid& grid) {
  const double mean_denom = l2_norm_field(reference.mean, grid);
  const double var_denom = l2_norm_field(reference.variance, grid);
  if (mean_denom <= 0.0 || var_denom <= 0.0)
    throw std::invalid_argument("error_vs_reference: reference has zero norm");
  return {l2_norm_field(estimate.mean - reference.mean, grid) / mean_denom,
          l2_norm_field(estimate.variance - reference.variance, grid) / var_denom};
}

double acceptance_rate(const Chain& chain) {
  if (chain.accepted.empty()) throw std::invalid_argument("acceptance_rate: empty chain");
  double acc = 0.0;
  for (const auto flag : chain.accepted) acc += flag;
  return acc / static_cast<double>(chain.accepted.size());
}

}  // namespace rbanova
