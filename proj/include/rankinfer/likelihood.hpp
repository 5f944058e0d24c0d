#ifndef RANKINFER_LIKELIHOOD_HPP
#define RANKINFER_LIKELIHOOD_HPP

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "rankinfer/model.hpp"
#include "rankinfer/types.hpp"

namespace rankinfer {

// The loss is summed over unordered edges:
//
//   Lbar(theta) = - sum_e sum_{k in e} ybar_{k,e} log p_{k,e}(theta),
//
// with ybar the win fraction. Summing over ordered M-tuples instead counts
// each edge M! times, so the ordered-tuple loss equals M! * Lbar.

namespace detail {

inline void check_dimension(const ComparisonDataset& data, Index size) {
  if (size != data.graph().n()) {
    throw ValidationError("score vector has " + std::to_string(size) +
                          " entries but the dataset has " +
                          std::to_string(data.graph().n()) + " items");
  }
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar neg_log_likelihood(const ComparisonDataset& data,
                                            const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  detail::check_dimension(data, theta.size());
  const ComparisonHypergraph& graph = data.graph();
  const Scalar trials(data.trials());
  Scalar loss(0);
  for (Index e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    Scalar top = theta(edge[0]);
    for (Index k = 1; k < edge.size(); ++k) {
      if (theta(edge[k]) > top) top = theta(edge[k]);
    }
    Scalar total(0);
    for (Index k = 0; k < edge.size(); ++k) total += exp(theta(edge[k]) - top);
    const Scalar log_norm = top + log(total);
    for (Index k = 0; k < edge.size(); ++k) {
      const int w = data.wins()(e, k);
      if (w != 0) loss -= Scalar(w) / trials * (theta(edge[k]) - log_norm);
    }
  }
  return loss;
}

/// d Lbar / d theta_m = sum_{e containing m} (p_{m,e} - ybar_{m,e}).
template <typename Derived>
Vector<typename Derived::Scalar> gradient(const ComparisonDataset& data,
                                          const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  detail::check_dimension(data, theta.size());
  const ComparisonHypergraph& graph = data.graph();
  const Scalar trials(data.trials());
  Vector<Scalar> grad = Vector<Scalar>::Zero(theta.size());
  Vector<Scalar> p(graph.m_way());
  for (Index e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    detail::edge_softmax(edge, theta, p);
    for (Index k = 0; k < edge.size(); ++k) {
      grad(edge[k]) += p(k) - Scalar(data.wins()(e, k)) / trials;
    }
  }
  return grad;
}

/// Exact Hessian sum_e [diag(p_e) - p_e p_e^T], scattered to item coordinates.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> hessian(
    const ComparisonDataset& data, const Eigen::MatrixBase<Derived>& theta) {
  using Scalar = typename Derived::Scalar;
  detail::check_dimension(data, theta.size());
  const ComparisonHypergraph& graph = data.graph();
  const Index n = theta.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  Vector<Scalar> p(graph.m_way());
  for (Index e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    detail::edge_softmax(edge, theta, p);
    for (Index a = 0; a < edge.size(); ++a) {
      h(edge[a], edge[a]) += p(a);
      for (Index b = 0; b < edge.size(); ++b) h(edge[a], edge[b]) -= p(a) * p(b);
    }
  }
  return h;
}

inline double neg_log_likelihood(const ComparisonDataset& data, const ScoreVector& theta) {
  return neg_log_likelihood(data, theta.values());
}

inline Eigen::VectorXd gradient(const ComparisonDataset& data, const ScoreVector& theta) {
  return gradient(data, theta.values());
}

}  // namespace rankinfer

#endif  // RANKINFER_LIKELIHOOD_HPP
