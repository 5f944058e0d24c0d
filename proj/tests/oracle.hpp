// Brute-force reference implementations for small instances. Every sum runs
// over ordered tuples of distinct items exactly as the ordered-tuple
// likelihood is written, in long double, with no shared code from the library
// beyond the dataset container.
#ifndef RANKINFER_TESTS_ORACLE_HPP
#define RANKINFER_TESTS_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "rankinfer/types.hpp"

namespace oracle {

using rankinfer::ComparisonDataset;
using rankinfer::Index;
using Real = long double;

inline Real factorial(Index k) {
  Real out = 1;
  for (Index i = 2; i <= k; ++i) out *= static_cast<Real>(i);
  return out;
}

// Calls fn(tuple) for every ordered tuple of `size` distinct items of [n].
inline void for_each_tuple(Index n, Index size, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> tuple;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<void()> rec = [&] {
    if (static_cast<Index>(tuple.size()) == size) {
      fn(tuple);
      return;
    }
    for (Index i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      used[static_cast<std::size_t>(i)] = true;
      tuple.push_back(i);
      rec();
      tuple.pop_back();
      used[static_cast<std::size_t>(i)] = false;
    }
  };
  rec();
}

// A_{i_1...i_M} and the outcomes of the matching edge.
class Instance {
 public:
  explicit Instance(const ComparisonDataset& data) : data_(data) {
    const auto& edges = data.graph().edges();
    for (std::size_t e = 0; e < edges.size(); ++e) lookup_[edges[e].members] = static_cast<Index>(e);
  }

  Index n() const { return data_.graph().n(); }
  Index m_way() const { return data_.graph().m_way(); }
  Real trials() const { return static_cast<Real>(data_.trials()); }

  // Edge index of the tuple's member set, or -1 when A = 0.
  Index edge_of(std::vector<Index> tuple) const {
    std::sort(tuple.begin(), tuple.end());
    auto it = lookup_.find(tuple);
    return it == lookup_.end() ? -1 : it->second;
  }

  // Mean outcome ybar of `item` on edge e.
  Real ybar(Index e, Index item) const {
    const auto& members = data_.graph().edge(e).members;
    const auto k = std::find(members.begin(), members.end(), item) - members.begin();
    return static_cast<Real>(data_.wins()(e, k)) / trials();
  }

  // y^(l) of `item` on edge e.
  Real y(Index e, Index item, Index l) const {
    const auto& members = data_.graph().edge(e).members;
    const auto k = std::find(members.begin(), members.end(), item) - members.begin();
    return data_.trial_winners()(e, l) == k ? 1 : 0;
  }

 private:
  const ComparisonDataset& data_;
  std::map<std::vector<Index>, Index> lookup_;
};

template <typename Vec>
Real softmax_at(const std::vector<Index>& tuple, const Vec& theta, Index item) {
  Real denom = 0;
  for (Index i : tuple) denom += std::exp(static_cast<Real>(theta[i]));
  return std::exp(static_cast<Real>(theta[item])) / denom;
}

// Ordered-tuple negative log-likelihood.
template <typename Vec>
Real ordered_loss(const ComparisonDataset& data, const Vec& theta) {
  const Instance inst(data);
  Real total = 0;
  for_each_tuple(inst.n(), inst.m_way(), [&](const std::vector<Index>& t) {
    const Index e = inst.edge_of(t);
    if (e < 0) return;
    for (Index item : t) total -= inst.ybar(e, item) * std::log(softmax_at(t, theta, item));
  });
  return total;
}

// Runs fn(e, full tuple) over ordered (M-1)-tuples of items other than m,
// with m appended, for tuples whose member set is an edge.
inline void for_each_tuple_with(const Instance& inst, Index m,
                                const std::function<void(Index, const std::vector<Index>&)>& fn) {
  for_each_tuple(inst.n(), inst.m_way() - 1, [&](const std::vector<Index>& t) {
    if (std::find(t.begin(), t.end(), m) != t.end()) return;
    std::vector<Index> full = t;
    full.push_back(m);
    const Index e = inst.edge_of(full);
    if (e >= 0) fn(e, full);
  });
}

// f^(m): M * sum over ordered (M-1)-tuples of (p_m - ybar_m).
template <typename Vec>
Real f_m(const ComparisonDataset& data, const Vec& theta, Index m) {
  const Instance inst(data);
  Real total = 0;
  for_each_tuple_with(inst, m, [&](Index e, const std::vector<Index>& t) {
    total += softmax_at(t, theta, m) - inst.ybar(e, m);
  });
  return static_cast<Real>(inst.m_way()) * total;
}

// g^(m): M * sum over ordered (M-1)-tuples of sum_j e^{theta_m + theta_j} / (sum)^2.
template <typename Vec>
Real g_m(const ComparisonDataset& data, const Vec& theta, Index m) {
  const Instance inst(data);
  Real total = 0;
  for_each_tuple_with(inst, m, [&](Index, const std::vector<Index>& t) {
    Real denom = 0;
    for (Index i : t) denom += std::exp(static_cast<Real>(theta[i]));
    for (Index j : t) {
      if (j == m) continue;
      total += std::exp(static_cast<Real>(theta[m]) + static_cast<Real>(theta[j])) / (denom * denom);
    }
  });
  return static_cast<Real>(inst.m_way()) * total;
}

// rho_m = [L/(M-1)! * sum over ordered (M-1)-tuples of the g summand]^{1/2}.
template <typename Vec>
Real rho_m(const ComparisonDataset& data, const Vec& theta, Index m) {
  const Instance inst(data);
  const Real g = g_m(data, theta, m) / static_cast<Real>(inst.m_way());
  return std::sqrt(inst.trials() / factorial(inst.m_way() - 1) * g);
}

// xi_{m l}: M / g^(m) * sum over ordered (M-1)-tuples of (p_m - y_m^(l)).
template <typename Vec>
Real xi_ml(const ComparisonDataset& data, const Vec& theta, Index m, Index l) {
  const Instance inst(data);
  Real total = 0;
  for_each_tuple_with(inst, m, [&](Index e, const std::vector<Index>& t) {
    total += softmax_at(t, theta, m) - inst.y(e, m, l);
  });
  return static_cast<Real>(inst.m_way()) / g_m(data, theta, m) * total;
}

// Degree of an item by a linear scan over the edge list.
inline Index degree_scan(const ComparisonDataset& data, Index item) {
  Index count = 0;
  for (const auto& edge : data.graph().edges()) {
    count += std::count(edge.members.begin(), edge.members.end(), item);
  }
  return count;
}

// Relative error; the floor only matters when both values are essentially zero.
inline Real rel_err(Real a, Real b) {
  return std::abs(a - b) / std::max<Real>(1e-8L, std::max(std::abs(a), std::abs(b)));
}

}  // namespace oracle

#endif  // RANKINFER_TESTS_ORACLE_HPP
