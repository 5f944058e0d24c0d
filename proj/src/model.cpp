#include "rankinfer/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rankinfer {

ScoreVector::ScoreVector(Eigen::VectorXd values, double kappa_max)
    : values_(std::move(values)) {
  if (values_.size() == 0) return;
  if (!values_.allFinite()) throw ValidationError("score vector has non-finite entries");
  if (std::abs(values_.sum()) > kSumZeroTolerance) {
    throw ValidationError("score vector does not sum to zero");
  }
  if (range() > kappa_max + 1e-12) {
    throw ValidationError("score range " + std::to_string(range()) +
                          " exceeds kappa_max " + std::to_string(kappa_max));
  }
}

ScoreVector ScoreVector::centered(const Eigen::VectorXd& raw, double kappa_max) {
  if (raw.size() == 0) return ScoreVector();
  Eigen::VectorXd v = raw.array() - raw.mean();
  return ScoreVector(std::move(v), kappa_max);
}

double ScoreVector::range() const {
  if (values_.size() == 0) return 0.0;
  return values_.maxCoeff() - values_.minCoeff();
}

Edge::Edge(std::vector<Index> items) : members(std::move(items)) {
  std::sort(members.begin(), members.end());
  if (members.size() < 2) throw InvalidEdgeError("edge needs at least two members");
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw InvalidEdgeError("edge has repeated members");
  }
  if (members.front() < 0) throw InvalidEdgeError("negative item index in edge");
}

ComparisonHypergraph::ComparisonHypergraph(Index n, Index m_way, std::vector<Edge> edges)
    : n_(n), m_way_(m_way), edges_(std::move(edges)) {
  if (n < 0) throw ValidationError("item count must be nonnegative");
  if (m_way < 2) throw ValidationError("edge size must be at least 2");
  for (const Edge& e : edges_) {
    if (e.size() != m_way) {
      throw InvalidEdgeError("edge of size " + std::to_string(e.size()) +
                             " in a " + std::to_string(m_way) + "-way graph");
    }
    if (e.members.back() >= n) {
      throw InvalidEdgeError("edge member " + std::to_string(e.members.back()) +
                             " out of range for " + std::to_string(n) + " items");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  incidence_.assign(static_cast<std::size_t>(n), {});
  for (Index e = 0; e < num_edges(); ++e) {
    const Edge& edge = edges_[static_cast<std::size_t>(e)];
    for (Index k = 0; k < m_way; ++k) {
      incidence_[static_cast<std::size_t>(edge[k])].push_back({e, k});
    }
  }
}

Index ComparisonHypergraph::degree(Index item) const {
  if (item < 0 || item >= n_) {
    throw ValidationError("item " + std::to_string(item) + " out of range");
  }
  return static_cast<Index>(incidence_[static_cast<std::size_t>(item)].size());
}

std::vector<Index> ComparisonHypergraph::isolated_items() const {
  std::vector<Index> out;
  for (Index i = 0; i < n_; ++i) {
    if (incidence_[static_cast<std::size_t>(i)].empty()) out.push_back(i);
  }
  return out;
}

Index degree(const ComparisonHypergraph& graph, Index item) {
  return graph.degree(item);
}

WinMatrix aggregate_wins(const TrialMatrix& winners, Index m_way) {
  WinMatrix wins = WinMatrix::Zero(winners.rows(), m_way);
  for (Index e = 0; e < winners.rows(); ++e) {
    for (Index l = 0; l < winners.cols(); ++l) {
      const Index k = winners(e, l);
      if (k >= m_way) throw ValidationError("winner position out of range");
      ++wins(e, k);
    }
  }
  return wins;
}

namespace {

std::vector<std::string> default_ids(Index n) {
  std::vector<std::string> ids(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = std::to_string(i + 1);
  return ids;
}

}  // namespace

ComparisonDataset::ComparisonDataset(ComparisonHypergraph graph, int trials,
                                     WinMatrix wins)
    : graph_(std::move(graph)), trials_(trials), wins_(std::move(wins)) {
  if (trials_ < 1) throw ValidationError("trials per edge must be positive");
  if (wins_.rows() != graph_.num_edges() || (wins_.rows() > 0 && wins_.cols() != graph_.m_way())) {
    throw ValidationError("win matrix shape does not match the graph");
  }
  if (wins_.rows() == 0) wins_.resize(0, graph_.m_way());
  for (Index e = 0; e < wins_.rows(); ++e) {
    if ((wins_.row(e).array() < 0).any()) {
      throw ValidationError("negative win count on edge " + std::to_string(e));
    }
    if (wins_.row(e).sum() != trials_) {
      throw ValidationError("win counts on edge " + std::to_string(e) +
                            " do not sum to the trial count");
    }
  }
  item_ids_ = default_ids(graph_.n());
}

ComparisonDataset::ComparisonDataset(ComparisonHypergraph graph, TrialMatrix winners)
    : graph_(std::move(graph)),
      trials_(static_cast<int>(winners.cols())),
      winners_(std::move(winners)) {
  if (winners_->rows() != graph_.num_edges()) {
    throw ValidationError("trial matrix has the wrong number of edges");
  }
  if (graph_.num_edges() > 0 && trials_ < 1) {
    throw ValidationError("trials per edge must be positive");
  }
  if (trials_ < 1) trials_ = 1;
  wins_ = aggregate_wins(*winners_, graph_.m_way());
  item_ids_ = default_ids(graph_.n());
}

const TrialMatrix& ComparisonDataset::trial_winners() const {
  if (!winners_) {
    throw MissingTrialLevelError(
        "dataset has aggregated win counts only; the multiplier bootstrap needs "
        "per-trial winners (load a trial CSV or a JSON dataset with trial_level)");
  }
  return *winners_;
}

void ComparisonDataset::set_item_ids(std::vector<std::string> ids) {
  if (static_cast<Index>(ids.size()) != graph_.n()) {
    throw ValidationError("item id map has the wrong size");
  }
  item_ids_ = std::move(ids);
}

std::optional<Index> ComparisonDataset::find_item(const std::string& id) const {
  auto it = std::find(item_ids_.begin(), item_ids_.end(), id);
  if (it == item_ids_.end()) return std::nullopt;
  return static_cast<Index>(it - item_ids_.begin());
}

}  // namespace rankinfer
