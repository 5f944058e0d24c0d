#ifndef RANKINFER_UQ_HPP
#define RANKINFER_UQ_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rankinfer/model.hpp"
#include "rankinfer/types.hpp"

namespace rankinfer {

// Per-item uncertainty quantities, all in the unordered-edge convention.
// With S_m the information share below, the ordered-tuple quantities are
//   g^(m) = M! S_m,   f^(m) = M! sum_{e containing m} (p_{m,e} - ybar_{m,e}),
//   rho_m^2 = L S_m,  sigma_mk^2 = 1/S_m + 1/S_k,
// so ratios such as f/g do not depend on the convention.

namespace detail {

inline void require_degree(const ComparisonHypergraph& graph, Index m) {
  if (m < 0 || m >= graph.n()) {
    throw ValidationError("item " + std::to_string(m) + " out of range");
  }
  if (graph.degree(m) == 0) {
    throw NonIdentifiableError(m, "item " + std::to_string(m) +
                                      " appears in no comparison and is not identifiable");
  }
}

}  // namespace detail

/// S_m(theta) = sum_{e containing m} p_{m,e} (1 - p_{m,e}).
template <typename Derived>
typename Derived::Scalar information_share(const ComparisonDataset& data,
                                           const Eigen::MatrixBase<Derived>& theta,
                                           Index m) {
  using Scalar = typename Derived::Scalar;
  const ComparisonHypergraph& graph = data.graph();
  detail::require_degree(graph, m);
  Vector<Scalar> p(graph.m_way());
  Scalar share(0);
  for (const Incidence& inc : graph.incidences(m)) {
    detail::edge_softmax(graph.edge(inc.edge), theta, p);
    share += p(inc.position) * (Scalar(1) - p(inc.position));
  }
  return share;
}

/// f^(m) / g^(m) = sum_{e containing m} (p_{m,e} - ybar_{m,e}) / S_m.
template <typename Derived>
typename Derived::Scalar score_direction(const ComparisonDataset& data,
                                         const Eigen::MatrixBase<Derived>& theta, Index m) {
  using Scalar = typename Derived::Scalar;
  const ComparisonHypergraph& graph = data.graph();
  detail::require_degree(graph, m);
  Vector<Scalar> p(graph.m_way());
  Scalar share(0);
  Scalar score(0);
  for (const Incidence& inc : graph.incidences(m)) {
    detail::edge_softmax(graph.edge(inc.edge), theta, p);
    const Scalar pk = p(inc.position);
    share += pk * (Scalar(1) - pk);
    score += pk - Scalar(data.wins()(inc.edge, inc.position)) / Scalar(data.trials());
  }
  return score / share;
}

/// S_m for every item; zero for items of degree zero.
Eigen::VectorXd information_shares(const ComparisonDataset& data, const Eigen::VectorXd& theta);

struct InferenceContext {
  Eigen::VectorXd s_share;
  Eigen::VectorXd rho;
  /// L x n multiplier residuals; column m averages to f^(m)/g^(m).
  Eigen::MatrixXd xi_hat;
  ScoreVector theta_used;
  std::vector<bool> identifiable;
  int trials = 1;

  Index n() const { return s_share.size(); }
  bool is_identifiable(Index m) const { return identifiable[static_cast<std::size_t>(m)]; }
  double sigma_hat(Index m, Index k) const {
    return std::sqrt(1.0 / s_share[m] + 1.0 / s_share[k]);
  }
  /// 1 / rho_m, the standard error of theta_hat_m.
  double standard_error(Index m) const { return 1.0 / rho[m]; }
};

/// Builds S, rho and xi_hat at `theta`. Requires trial-level data.
InferenceContext build_context(const ComparisonDataset& data, const ScoreVector& theta);

struct ScoreInterval {
  Index item;
  double lower;
  double upper;
};

/// Marginal (per-item, not simultaneous) intervals theta_m -/+ z_{1-alpha/2} / rho_m.
/// Items without comparisons get an unbounded interval.
std::vector<ScoreInterval> score_ci(const InferenceContext& context, double alpha);

/// delta_m = theta_hat_m - theta*_m + f^(m)/g^(m) at theta*. Zero for items
/// of degree zero.
Eigen::VectorXd delta_residual(const ComparisonDataset& data, const ScoreVector& theta_hat,
                               const ScoreVector& theta_truth);

}  // namespace rankinfer

#endif  // RANKINFER_UQ_HPP
