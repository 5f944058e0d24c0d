#ifndef RANKINFER_RANK_INFERENCE_HPP
#define RANKINFER_RANK_INFERENCE_HPP

#include <optional>
#include <vector>

#include "rankinfer/bootstrap.hpp"
#include "rankinfer/mle.hpp"
#include "rankinfer/uq.hpp"

namespace rankinfer {

// Ranks are 1-based with rank 1 for the largest score.

enum class IntervalSide { kTwoSided, kLeftSided };

struct RankInterval {
  Index item = 0;
  Index lower = 1;
  Index upper = 1;
  IntervalSide side = IntervalSide::kTwoSided;

  Index length() const { return upper - lower; }
};

struct TopKDecision {
  Index item = 0;
  Index k = 1;
  bool reject = false;  // rejects "item is among the top k"
  Index lower_bound = 1;
  CriticalValue critical_value;
};

struct ScreeningResult {
  Index k = 1;
  std::vector<Index> selected;  // items whose one-sided lower rank bound is <= k
  Index d_hat = 0;              // admit the top d_hat items by estimated rank
  CriticalValue critical_value;
  CriticalValue unit_critical_value;
};

struct RankReport {
  double alpha = 0.05;
  std::vector<Index> item_set;
  std::vector<RankInterval> intervals;
  CriticalValue critical_value;
  std::optional<std::vector<TopKDecision>> test_results;
  std::optional<ScreeningResult> screening;
};

/// Rank bounds for the items of the critical value's item set:
///   lower = 1 + #{k != m : theta_k - theta_m >  tau_mk * z}
///   upper = n - #{k != m : theta_k - theta_m < -tau_mk * z}
/// (upper = n for one-sided critical values). Items of degree zero never
/// trigger an indicator.
std::vector<RankInterval> rank_intervals(const ScoreEstimate& estimate,
                                         const InferenceContext& context,
                                         const std::vector<Index>& item_set,
                                         const CriticalValue& critical_value,
                                         const BootstrapConfig& config);

/// Baseline interval with threshold z_{1-alpha/2}/rho_m + (1 + c0) sqrt(2 log n)/rho_k.
RankInterval bonferroni_intervals(const ScoreEstimate& estimate, const InferenceContext& context,
                                  Index item, double alpha, double c0 = 1.0);

/// Tests H0: rank(item) <= k with the one-sided bootstrap lower bound.
TopKDecision top_k_test(const ScoreEstimate& estimate, const InferenceContext& context,
                        Index item, Index k, double alpha, const BootstrapConfig& config,
                        const Stream& rng);

/// Screening set {m : one-sided lower bound <= k} over all items, plus the
/// admission count from a separate unit-normalizer bootstrap.
ScreeningResult sure_screening(const ScoreEstimate& estimate, const InferenceContext& context,
                               Index k, double alpha, const BootstrapConfig& config,
                               const Stream& rng);

/// Lower bound alone, for a given threshold scale function.
template <typename ScaleFn>
Index rank_lower_bound(const Eigen::VectorXd& theta, const InferenceContext& context, Index m,
                       ScaleFn&& threshold) {
  Index count = 0;
  for (Index k = 0; k < theta.size(); ++k) {
    if (k == m || !context.is_identifiable(k)) continue;
    if (theta[k] - theta[m] > threshold(m, k)) ++count;
  }
  return 1 + count;
}

}  // namespace rankinfer

#endif  // RANKINFER_RANK_INFERENCE_HPP
