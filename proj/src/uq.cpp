#include "rankinfer/uq.hpp"

#include <limits>

#include "rankinfer/normal.hpp"

namespace rankinfer {

Eigen::VectorXd information_shares(const ComparisonDataset& data, const Eigen::VectorXd& theta) {
  const ComparisonHypergraph& graph = data.graph();
  if (theta.size() != graph.n()) throw ValidationError("score vector has the wrong dimension");
  Eigen::VectorXd share = Eigen::VectorXd::Zero(graph.n());
  Eigen::VectorXd p(graph.m_way());
  for (Index e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    detail::edge_softmax(edge, theta, p);
    for (Index k = 0; k < edge.size(); ++k) share[edge[k]] += p[k] * (1.0 - p[k]);
  }
  return share;
}

InferenceContext build_context(const ComparisonDataset& data, const ScoreVector& theta) {
  const ComparisonHypergraph& graph = data.graph();
  const TrialMatrix& winners = data.trial_winners();
  if (theta.size() != graph.n()) throw ValidationError("score vector has the wrong dimension");
  const Index n = graph.n();
  const Index trials = data.trials();

  InferenceContext ctx;
  ctx.theta_used = theta;
  ctx.trials = data.trials();
  ctx.identifiable.resize(static_cast<std::size_t>(n));
  ctx.s_share = Eigen::VectorXd::Zero(n);

  // xi_hat(l, m) = (sum_{e containing m} p_{m,e} - #{e containing m: m wins trial l on e}) / S_m
  Eigen::VectorXd prob_mass = Eigen::VectorXd::Zero(n);
  ctx.xi_hat = Eigen::MatrixXd::Zero(trials, n);
  Eigen::VectorXd p(graph.m_way());
  for (Index e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    detail::edge_softmax(edge, theta.values(), p);
    for (Index k = 0; k < edge.size(); ++k) {
      ctx.s_share[edge[k]] += p[k] * (1.0 - p[k]);
      prob_mass[edge[k]] += p[k];
    }
    for (Index l = 0; l < trials; ++l) ctx.xi_hat(l, edge[winners(e, l)]) -= 1.0;
  }

  ctx.rho = Eigen::VectorXd::Zero(n);
  for (Index m = 0; m < n; ++m) {
    const bool ok = graph.degree(m) > 0 && ctx.s_share[m] > 0.0;
    ctx.identifiable[static_cast<std::size_t>(m)] = ok;
    if (!ok) continue;
    ctx.xi_hat.col(m).array() += prob_mass[m];
    ctx.xi_hat.col(m) /= ctx.s_share[m];
    ctx.rho[m] = std::sqrt(static_cast<double>(trials) * ctx.s_share[m]);
  }
  return ctx;
}

std::vector<ScoreInterval> score_ci(const InferenceContext& context, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
  const double z = alpha >= 1.0 ? 0.0 : normal_quantile(1.0 - alpha / 2.0);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<ScoreInterval> out;
  out.reserve(static_cast<std::size_t>(context.n()));
  for (Index m = 0; m < context.n(); ++m) {
    const double centre = context.theta_used[m];
    if (!context.is_identifiable(m)) {
      out.push_back({m, -inf, inf});
      continue;
    }
    const double half = z / context.rho[m];
    out.push_back({m, centre - half, centre + half});
  }
  return out;
}

Eigen::VectorXd delta_residual(const ComparisonDataset& data, const ScoreVector& theta_hat,
                               const ScoreVector& theta_truth) {
  const Index n = data.graph().n();
  if (theta_hat.size() != n || theta_truth.size() != n) {
    throw ValidationError("score vectors have the wrong dimension");
  }
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (Index m = 0; m < n; ++m) {
    if (data.graph().degree(m) == 0) continue;
    delta[m] = theta_hat[m] - theta_truth[m] + score_direction(data, theta_truth.values(), m);
  }
  return delta;
}

}  // namespace rankinfer
