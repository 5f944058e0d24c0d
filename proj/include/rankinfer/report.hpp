#ifndef RANKINFER_REPORT_HPP
#define RANKINFER_REPORT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rankinfer/mle.hpp"
#include "rankinfer/rank_inference.hpp"

namespace rankinfer {

inline constexpr const char* kVersion = "0.1.0";

struct TopKEntry {
  std::string item;
  Index k = 1;
  bool reject = false;
  Index lower_bound = 1;

  bool operator==(const TopKEntry&) const = default;
};

struct ScreeningEntry {
  Index k = 1;
  std::vector<std::string> selected;
  Index d_hat = 0;
  double unit_critical_value = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t unit_seed = 0;

  bool operator==(const ScreeningEntry&) const = default;
};

/// Everything a CLI run produces. Item references use external ids; standard
/// errors of items without comparisons are infinite and written as null.
struct RunReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> item_ids;
  std::vector<double> theta_hat;
  std::vector<double> se;
  std::vector<Index> rank_point;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> non_identifiable;

  std::vector<std::string> items;                // the item set of the intervals
  std::vector<std::array<Index, 2>> rank_ci;     // aligned with `items`
  std::string interval_side;                     // "two-sided" or "left-sided"
  std::optional<double> critical_value;
  double alpha = 0.05;
  int bootstrap_draws = 0;
  std::uint64_t seed = 0;
  std::string normalizer;

  std::vector<TopKEntry> tests;
  std::optional<ScreeningEntry> screening;
  std::vector<std::string> warnings;

  /// Only recorded on request so that outputs stay byte-identical across runs.
  std::optional<double> wall_clock_seconds;
  std::string version = kVersion;

  bool operator==(const RunReport&) const = default;
};

void to_json(nlohmann::json& j, const RunReport& report);
void from_json(const nlohmann::json& j, RunReport& report);

/// Fills the estimate part: theta_hat, se = 1/rho_m(theta_hat), rank_point
/// and convergence details.
void fill_estimate(RunReport& report, const ComparisonDataset& data, const ScoreEstimate& estimate);

/// Fills rank_ci/items/critical value from intervals.
void fill_intervals(RunReport& report, const ComparisonDataset& data,
                    const std::vector<RankInterval>& intervals, const CriticalValue& critical_value);

}  // namespace rankinfer

#endif  // RANKINFER_REPORT_HPP
