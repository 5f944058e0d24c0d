#ifndef RANKINFER_SIMULATE_HPP
#define RANKINFER_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "rankinfer/rng.hpp"
#include "rankinfer/types.hpp"

namespace rankinfer {

/// How the true scores are generated.
///   uniform-range(a, b): i.i.d. Uniform[a, b]
///   grid(a, b):          theta_i = a + (i - 1) (b - a) / n, i = 1..n
///   explicit:            the given values
struct ScoreSpec {
  enum class Kind { kUniformRange, kGrid, kExplicit };
  Kind kind = Kind::kUniformRange;
  double a = 2.0;
  double b = 4.0;
  std::vector<double> values;

  static ScoreSpec uniform_range(double a, double b) { return {Kind::kUniformRange, a, b, {}}; }
  static ScoreSpec grid(double a, double b) { return {Kind::kGrid, a, b, {}}; }
  static ScoreSpec explicit_values(std::vector<double> v) {
    return {Kind::kExplicit, 0.0, 0.0, std::move(v)};
  }
};

struct SimulationConfig {
  Index n = 60;
  Index m_way = 3;
  double edge_prob = 0.05;
  int trials = 20;
  std::uint64_t seed = 1;
  ScoreSpec score_spec;
  /// Expected edge count above which sampling refuses to run.
  double max_edges = 5e7;
  double kappa_max = kDefaultKappaMax;

  void validate() const;
};

void to_json(nlohmann::json& j, const ScoreSpec& spec);
void from_json(const nlohmann::json& j, ScoreSpec& spec);
void to_json(nlohmann::json& j, const SimulationConfig& config);
void from_json(const nlohmann::json& j, SimulationConfig& config);

/// C(n, k) in floating point.
double binomial_coefficient(Index n, Index k);

/// Raw (uncentered) true scores for `config`.
Eigen::VectorXd generate_truth(const SimulationConfig& config, Stream& rng);

/// Includes each M-subset of the n items independently with probability p.
ComparisonHypergraph sample_hypergraph(const SimulationConfig& config, Stream& rng);

/// Draws L categorical top choices per edge from the softmax of `truth`.
ComparisonDataset sample_outcomes(const ComparisonHypergraph& graph,
                                  const ScoreVector& truth, int trials, Stream& rng);

struct Simulation {
  Eigen::VectorXd raw_truth;
  ScoreVector truth;  // centered raw_truth
  ComparisonDataset data;
};

/// One replication; substreams are keyed by (config.seed, replication, tag).
Simulation simulate(const SimulationConfig& config, std::uint64_t replication = 0);

}  // namespace rankinfer

#endif  // RANKINFER_SIMULATE_HPP
