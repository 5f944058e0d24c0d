#include "rankinfer/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

namespace rankinfer {

namespace {

constexpr double kBoundSlack = 1e-9;

// Connected components of the hypergraph restricted to identifiable items.
std::vector<Index> component_labels(const ComparisonHypergraph& graph) {
  std::vector<Index> parent(static_cast<std::size_t>(graph.n()));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& px = parent[static_cast<std::size_t>(x)];
      px = parent[static_cast<std::size_t>(px)];
      x = px;
    }
    return x;
  };
  for (const Edge& e : graph.edges()) {
    for (Index k = 1; k < e.size(); ++k) {
      parent[static_cast<std::size_t>(find(e[k]))] = find(e[0]);
    }
  }
  std::vector<Index> label(parent.size());
  for (Index i = 0; i < graph.n(); ++i) label[static_cast<std::size_t>(i)] = find(i);
  return label;
}

}  // namespace

void FitConfig::validate() const {
  if (!(grad_tol > 0.0)) throw ValidationError("grad_tol must be positive");
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
  if (!(kappa_max > 0.0)) throw ValidationError("kappa_max must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ValidationError("shrink must lie in (0, 1)");
}

Eigen::VectorXd project_feasible(const Eigen::VectorXd& v, const std::vector<bool>& active,
                                 double bound) {
  const Index n = v.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  Index count = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Index i = 0; i < n; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    ++count;
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  if (count == 0) return out;

  auto clipped_sum = [&](double shift) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)]) s += std::clamp(v[i] - shift, -bound, bound);
    }
    return s;
  };
  // The clipped sum is nonincreasing in the shift; bracket its root.
  double a = lo - bound;
  double b = hi + bound;
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    const double mid = 0.5 * (a + b);
    if (clipped_sum(mid) > 0.0) a = mid; else b = mid;
  }
  const double shift = 0.5 * (a + b);
  Index free_count = 0;
  for (Index i = 0; i < n; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    out[i] = std::clamp(v[i] - shift, -bound, bound);
    if (std::abs(out[i]) < bound) ++free_count;
  }
  // Remove the bisection residual from the unclipped coordinates.
  const double residual = out.sum();
  if (free_count > 0 && residual != 0.0) {
    for (Index i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)] && std::abs(out[i]) < bound) {
        out[i] = std::clamp(out[i] - residual / static_cast<double>(free_count), -bound, bound);
      }
    }
  }
  return out;
}

ScoreEstimate fit_mle(const ComparisonDataset& data, const FitConfig& config) {
  config.validate();
  const ComparisonHypergraph& graph = data.graph();
  const Index n = graph.n();
  const double bound = 0.5 * config.kappa_max;

  ScoreEstimate est;
  std::vector<bool> active(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const bool ok = graph.degree(i) > 0;
    active[static_cast<std::size_t>(i)] = ok;
    if (!ok) est.non_identifiable_items.push_back(i);
  }
  if (graph.num_edges() == 0) {
    throw NoDataError("no comparisons: every item has degree zero");
  }
  const std::vector<Index> component = component_labels(graph);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  double objective = neg_log_likelihood(data, theta);
  est.objective_trace.push_back(objective);

  std::vector<Index> free;
  free.reserve(static_cast<std::size_t>(n));
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd grad = gradient(data, theta);

    // Multiplier of the sum constraint from the interior coordinates.
    double interior_sum = 0.0;
    Index interior = 0;
    for (Index i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)] && std::abs(theta[i]) < bound - kBoundSlack) {
        interior_sum += grad[i];
        ++interior;
      }
    }
    const double lambda = interior > 0 ? interior_sum / static_cast<double>(interior) : 0.0;

    // An item at a bound stays fixed while the descent direction points outward.
    free.clear();
    std::vector<bool> stuck_component(static_cast<std::size_t>(n), false);
    for (Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      const bool at_upper = theta[i] >= bound - kBoundSlack && grad[i] - lambda < 0.0;
      const bool at_lower = theta[i] <= -bound + kBoundSlack && grad[i] - lambda > 0.0;
      if (at_upper || at_lower) {
        stuck_component[static_cast<std::size_t>(component[static_cast<std::size_t>(i)])] = true;
      } else {
        free.push_back(i);
      }
    }
    const Index nf = static_cast<Index>(free.size());

    double mean_free = 0.0;
    for (Index i : free) mean_free += grad[i];
    if (nf > 0) mean_free /= static_cast<double>(nf);
    double residual = 0.0;
    for (Index i : free) residual = std::max(residual, std::abs(grad[i] - mean_free));
    est.final_grad_norm = residual;
    est.iterations = iter;
    if (residual <= config.grad_tol) {
      est.converged = true;
      break;
    }
    if (iter >= config.max_iter || nf == 0) break;

    const Eigen::MatrixXd full_h = hessian(data, theta);
    Eigen::MatrixXd h(nf, nf);
    Eigen::VectorXd g(nf);
    for (Index a = 0; a < nf; ++a) {
      g[a] = grad[free[static_cast<std::size_t>(a)]];
      for (Index b = 0; b < nf; ++b) {
        h(a, b) = full_h(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
      }
    }
    // Components without fixed items are flat along their indicator vector;
    // a rank-one term on each removes that null direction without changing
    // the step on the constraint subspace.
    const double scale = std::max(h.diagonal().mean(), 1e-3);
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(n));
    for (Index a = 0; a < nf; ++a) {
      const Index c = component[static_cast<std::size_t>(free[static_cast<std::size_t>(a)])];
      if (!stuck_component[static_cast<std::size_t>(c)]) groups[static_cast<std::size_t>(c)].push_back(a);
    }
    for (const auto& grp : groups) {
      if (grp.empty()) continue;
      const double w = scale / static_cast<double>(grp.size());
      for (Index a : grp) {
        for (Index b : grp) h(a, b) += w;
      }
    }
    h.diagonal().array() += config.ridge;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    const Eigen::VectorXd u = ldlt.solve(g);
    const Eigen::VectorXd v = ldlt.solve(Eigen::VectorXd::Ones(nf));
    const Eigen::VectorXd step_free = -u + v * (u.sum() / v.sum());

    Eigen::VectorXd direction = Eigen::VectorXd::Zero(n);
    for (Index a = 0; a < nf; ++a) direction[free[static_cast<std::size_t>(a)]] = step_free[a];

    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(objective));
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      Eigen::VectorXd candidate = project_feasible(theta + t * direction, active, bound);
      const double value = neg_log_likelihood(data, candidate);
      const double predicted = grad.dot(candidate - theta);
      if (value <= objective + config.sufficient_decrease * predicted + slack) {
        theta = std::move(candidate);
        objective = value;
        accepted = true;
        break;
      }
      t *= config.shrink;
    }
    if (!accepted) break;
    est.objective_trace.push_back(objective);
  }

  for (Index i = 0; i < n; ++i) {
    if (active[static_cast<std::size_t>(i)] && std::abs(theta[i]) >= bound - kBoundSlack) {
      est.boundary_items.push_back(i);
    }
  }
  est.theta_hat = ScoreVector(std::move(theta), config.kappa_max);
  return est;
}

std::vector<Index> point_ranks(const Eigen::VectorXd& theta) {
  const Index n = theta.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return theta[a] > theta[b]; });
  std::vector<Index> rank(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r + 1;
  return rank;
}

}  // namespace rankinfer
