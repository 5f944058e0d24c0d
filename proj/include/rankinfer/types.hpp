#ifndef RANKINFER_TYPES_HPP
#define RANKINFER_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rankinfer {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// E x M win counts, column k aligned with Edge::members[k].
using WinMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
// E x L winner positions (index into Edge::members) per trial.
using TrialMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kDefaultKappaMax = 10.0;
inline constexpr double kSumZeroTolerance = 1e-8;

// Error hierarchy. ValidationError maps to CLI exit code 2, ResourceError to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class InvalidEdgeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NoDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingTrialLevelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonIdentifiableError : public ValidationError {
 public:
  NonIdentifiableError(Index item, const std::string& what)
      : ValidationError(what), item_(item) {}
  Index item() const { return item_; }

 private:
  Index item_;
};

class ContractError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Preference scores on the identified subspace: entries sum to zero and
/// their range is bounded by `kappa_max`.
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(Eigen::VectorXd values, double kappa_max = kDefaultKappaMax);

  /// Subtracts the mean; the range bound is still enforced.
  static ScoreVector centered(const Eigen::VectorXd& raw,
                              double kappa_max = kDefaultKappaMax);

  const Eigen::VectorXd& values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }
  double range() const;

 private:
  Eigen::VectorXd values_;
};

/// An unordered comparison set, stored with strictly increasing members.
struct Edge {
  std::vector<Index> members;

  Edge() = default;
  explicit Edge(std::vector<Index> items);  // sorts; rejects duplicates and size < 2

  Index size() const { return static_cast<Index>(members.size()); }
  Index operator[](Index k) const { return members[static_cast<std::size_t>(k)]; }
  bool operator==(const Edge&) const = default;
  auto operator<=>(const Edge&) const = default;
};

/// Occurrence of an item inside an edge.
struct Incidence {
  Index edge;
  Index position;
};

/// M-uniform comparison hypergraph on items 0..n-1.
class ComparisonHypergraph {
 public:
  ComparisonHypergraph() = default;
  /// Sorts and deduplicates `edges`; every edge must have exactly `m_way`
  /// members, all below `n`.
  ComparisonHypergraph(Index n, Index m_way, std::vector<Edge> edges);

  Index n() const { return n_; }
  Index m_way() const { return m_way_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }

  Index degree(Index item) const;
  const std::vector<Incidence>& incidences(Index item) const {
    return incidence_[static_cast<std::size_t>(item)];
  }
  /// Items that appear in no edge.
  std::vector<Index> isolated_items() const;

 private:
  Index n_ = 0;
  Index m_way_ = 2;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> incidence_;
};

/// Top-choice outcomes: L trials on every edge of the graph.
class ComparisonDataset {
 public:
  ComparisonDataset() = default;
  /// Aggregated counts only. Each row of `wins` must sum to `trials`.
  ComparisonDataset(ComparisonHypergraph graph, int trials, WinMatrix wins);
  /// Trial-level winners (E x L positions); wins are aggregated from them.
  ComparisonDataset(ComparisonHypergraph graph, TrialMatrix winners);

  const ComparisonHypergraph& graph() const { return graph_; }
  int trials() const { return trials_; }
  const WinMatrix& wins() const { return wins_; }
  bool has_trial_level() const { return winners_.has_value(); }
  /// Throws MissingTrialLevelError when only aggregates are stored.
  const TrialMatrix& trial_winners() const;

  /// External item labels; defaults to "1".."n".
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  void set_item_ids(std::vector<std::string> ids);
  /// Dense index of an external label, if present.
  std::optional<Index> find_item(const std::string& id) const;

  double win_fraction(Index e, Index k) const {
    return static_cast<double>(wins_(e, k)) / static_cast<double>(trials_);
  }

 private:
  ComparisonHypergraph graph_;
  int trials_ = 1;
  WinMatrix wins_;
  std::optional<TrialMatrix> winners_;
  std::vector<std::string> item_ids_;
};

/// Aggregates trial-level winners into per-edge win counts.
WinMatrix aggregate_wins(const TrialMatrix& winners, Index m_way);

}  // namespace rankinfer

#endif  // RANKINFER_TYPES_HPP
