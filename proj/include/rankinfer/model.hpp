#ifndef RANKINFER_MODEL_HPP
#define RANKINFER_MODEL_HPP

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "rankinfer/types.hpp"

namespace rankinfer {

namespace detail {

// Softmax of theta over the edge members, written into `out` (size M).
// Callers guarantee the members are in range.
template <typename Derived, typename Out>
void edge_softmax(const Edge& edge, const Eigen::MatrixBase<Derived>& theta,
                  Out& out) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  const Index m = edge.size();
  Scalar top = theta(edge[0]);
  for (Index k = 1; k < m; ++k) {
    if (theta(edge[k]) > top) top = theta(edge[k]);
  }
  Scalar total(0);
  for (Index k = 0; k < m; ++k) {
    out(k) = exp(theta(edge[k]) - top);
    total += out(k);
  }
  for (Index k = 0; k < m; ++k) out(k) /= total;
}

}  // namespace detail

/// Top-choice probabilities on `edge`: the softmax of the member scores.
template <typename Derived>
Vector<typename Derived::Scalar> choice_probabilities(
    const Edge& edge, const Eigen::MatrixBase<Derived>& theta) {
  for (Index item : edge.members) {
    if (item < 0 || item >= theta.size()) {
      throw InvalidEdgeError("edge member " + std::to_string(item) +
                             " out of range for " + std::to_string(theta.size()) +
                             " items");
    }
  }
  Vector<typename Derived::Scalar> out(edge.size());
  detail::edge_softmax(edge, theta, out);
  return out;
}

inline Eigen::VectorXd choice_probabilities(const Edge& edge,
                                            const ScoreVector& scores) {
  return choice_probabilities(edge, scores.values());
}

/// Number of edges containing `item`.
Index degree(const ComparisonHypergraph& graph, Index item);

}  // namespace rankinfer

#endif  // RANKINFER_MODEL_HPP
