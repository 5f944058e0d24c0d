#include "rankinfer/simulate.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "rankinfer/model.hpp"

namespace rankinfer {

namespace {

constexpr double kEnumerationLimit = 1e7;

// Advances `idx` to the next M-combination of [0, n) in lexicographic order.
bool next_combination(std::vector<Index>& idx, Index n) {
  const Index m = static_cast<Index>(idx.size());
  Index i = m - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < m; ++j) {
    idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

// Floyd's algorithm: a uniform M-subset of [0, n).
std::vector<Index> random_subset(Index n, Index m, Stream& rng) {
  std::set<Index> chosen;
  for (Index j = n - m; j < n; ++j) {
    std::uniform_int_distribution<Index> pick(0, j);
    Index t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

const char* kind_name(ScoreSpec::Kind kind) {
  switch (kind) {
    case ScoreSpec::Kind::kUniformRange: return "uniform-range";
    case ScoreSpec::Kind::kGrid: return "grid";
    case ScoreSpec::Kind::kExplicit: return "explicit";
  }
  return "";
}

}  // namespace

void SimulationConfig::validate() const {
  if (n < 2) throw ValidationError("n must be at least 2");
  if (m_way < 2 || m_way > n) throw ValidationError("m_way must lie in [2, n]");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw ValidationError("edge_prob must lie in (0, 1]");
  }
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (m_way > 255) throw ValidationError("m_way above 255 is not supported");
  if (score_spec.kind == ScoreSpec::Kind::kExplicit &&
      static_cast<Index>(score_spec.values.size()) != n) {
    throw ValidationError("explicit score vector must have n entries");
  }
  if (score_spec.kind != ScoreSpec::Kind::kExplicit &&
      std::abs(score_spec.b - score_spec.a) > kappa_max) {
    throw ValidationError("score range exceeds kappa_max");
  }
}

void to_json(nlohmann::json& j, const ScoreSpec& spec) {
  j = nlohmann::json{{"type", kind_name(spec.kind)}};
  if (spec.kind == ScoreSpec::Kind::kExplicit) {
    j["values"] = spec.values;
  } else {
    j["a"] = spec.a;
    j["b"] = spec.b;
  }
}

void from_json(const nlohmann::json& j, ScoreSpec& spec) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "uniform-range") {
    spec = ScoreSpec::uniform_range(j.at("a").get<double>(), j.at("b").get<double>());
  } else if (type == "grid") {
    spec = ScoreSpec::grid(j.at("a").get<double>(), j.at("b").get<double>());
  } else if (type == "explicit") {
    spec = ScoreSpec::explicit_values(j.at("values").get<std::vector<double>>());
  } else {
    throw ValidationError("unknown score_spec type '" + type + "'");
  }
}

void to_json(nlohmann::json& j, const SimulationConfig& c) {
  j = nlohmann::json{{"n", c.n},         {"m_way", c.m_way}, {"edge_prob", c.edge_prob},
                     {"trials", c.trials}, {"seed", c.seed},   {"score_spec", c.score_spec}};
}

void from_json(const nlohmann::json& j, SimulationConfig& c) {
  c.n = j.at("n").get<Index>();
  c.m_way = j.at("m_way").get<Index>();
  c.edge_prob = j.at("edge_prob").get<double>();
  c.trials = j.at("trials").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.score_spec = j.at("score_spec").get<ScoreSpec>();
}

double binomial_coefficient(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return out < 9e15 ? std::round(out) : out;
}

Eigen::VectorXd generate_truth(const SimulationConfig& config, Stream& rng) {
  const ScoreSpec& spec = config.score_spec;
  Eigen::VectorXd theta(config.n);
  switch (spec.kind) {
    case ScoreSpec::Kind::kUniformRange:
      for (Index i = 0; i < config.n; ++i) theta[i] = spec.a + (spec.b - spec.a) * rng.uniform();
      break;
    case ScoreSpec::Kind::kGrid:
      for (Index i = 0; i < config.n; ++i) {
        theta[i] = spec.a + (spec.b - spec.a) * static_cast<double>(i) /
                                static_cast<double>(config.n);
      }
      break;
    case ScoreSpec::Kind::kExplicit:
      theta = Eigen::Map<const Eigen::VectorXd>(spec.values.data(), config.n);
      break;
  }
  return theta;
}

ComparisonHypergraph sample_hypergraph(const SimulationConfig& config, Stream& rng) {
  config.validate();
  const double total = binomial_coefficient(config.n, config.m_way);
  if (total * config.edge_prob > config.max_edges) {
    throw ResourceError("expected edge count " + std::to_string(total * config.edge_prob) +
                        " exceeds the cap of " + std::to_string(config.max_edges));
  }

  std::vector<Edge> edges;
  if (total <= kEnumerationLimit) {
    std::vector<Index> idx(static_cast<std::size_t>(config.m_way));
    for (Index k = 0; k < config.m_way; ++k) idx[static_cast<std::size_t>(k)] = k;
    do {
      if (rng.uniform() < config.edge_prob) edges.emplace_back(idx);
    } while (next_combination(idx, config.n));
  } else {
    std::binomial_distribution<long long> count_dist(static_cast<long long>(total),
                                                     config.edge_prob);
    const long long count = count_dist(rng);
    std::set<Edge> chosen;
    while (static_cast<long long>(chosen.size()) < count) {
      chosen.insert(Edge(random_subset(config.n, config.m_way, rng)));
    }
    edges.assign(chosen.begin(), chosen.end());
  }
  return ComparisonHypergraph(config.n, config.m_way, std::move(edges));
}

ComparisonDataset sample_outcomes(const ComparisonHypergraph& graph,
                                  const ScoreVector& truth, int trials, Stream& rng) {
  if (truth.size() != graph.n()) throw ValidationError("truth has the wrong dimension");
  if (trials < 1) throw ValidationError("trials must be at least 1");
  const Index m = graph.m_way();
  TrialMatrix winners(graph.num_edges(), trials);
  Eigen::VectorXd cumulative(m);
  for (Index e = 0; e < graph.num_edges(); ++e) {
    detail::edge_softmax(graph.edge(e), truth.values(), cumulative);
    for (Index k = 1; k < m; ++k) cumulative[k] += cumulative[k - 1];
    for (int l = 0; l < trials; ++l) {
      const double u = rng.uniform() * cumulative[m - 1];
      Index k = 0;
      while (k < m - 1 && u >= cumulative[k]) ++k;
      winners(e, l) = static_cast<std::uint8_t>(k);
    }
  }
  return ComparisonDataset(graph, std::move(winners));
}

Simulation simulate(const SimulationConfig& config, std::uint64_t replication) {
  config.validate();
  Stream truth_rng(config.seed, replication, StreamTag::kTruth);
  Stream graph_rng(config.seed, replication, StreamTag::kGraph);
  Stream outcome_rng(config.seed, replication, StreamTag::kOutcomes);

  Simulation sim;
  sim.raw_truth = generate_truth(config, truth_rng);
  sim.truth = ScoreVector::centered(sim.raw_truth, config.kappa_max);
  sim.data = sample_outcomes(sample_hypergraph(config, graph_rng), sim.truth,
                             config.trials, outcome_rng);
  return sim;
}

}  // namespace rankinfer
