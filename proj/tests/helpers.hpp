#ifndef RANKINFER_TESTS_HELPERS_HPP
#define RANKINFER_TESTS_HELPERS_HPP

#include <random>

#include "rankinfer/simulate.hpp"

namespace testing_helpers {

using namespace rankinfer;

// Random small instance with trial-level outcomes.
inline Simulation small_instance(Index n, Index m_way, double p, int trials, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.n = n;
  cfg.m_way = m_way;
  cfg.edge_prob = p;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.score_spec = ScoreSpec::uniform_range(-1.5, 1.5);
  return simulate(cfg);
}

// Random sum-zero vector with entries roughly in [-scale, scale].
inline Eigen::VectorXd random_centered(Index n, double scale, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(gen);
  return v.array() - v.mean();
}

inline ComparisonDataset single_edge(std::vector<Index> members, Index n,
                                     std::vector<std::uint8_t> winners) {
  const Index m_way = static_cast<Index>(members.size());
  ComparisonHypergraph graph(n, m_way, {Edge(std::move(members))});
  TrialMatrix t(1, static_cast<Index>(winners.size()));
  for (std::size_t l = 0; l < winners.size(); ++l) t(0, static_cast<Index>(l)) = winners[l];
  return ComparisonDataset(std::move(graph), std::move(t));
}

}  // namespace testing_helpers

#endif  // RANKINFER_TESTS_HELPERS_HPP
