#include "rankinfer/rank_inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankinfer/normal.hpp"

namespace rankinfer {

namespace {

void check_estimate(const ScoreEstimate& estimate, const InferenceContext& context) {
  if (estimate.theta_hat.size() != context.n()) {
    throw ContractError("estimate and inference context disagree on the item count");
  }
}

template <typename ScaleFn>
RankInterval interval_for(const Eigen::VectorXd& theta, const InferenceContext& context, Index m,
                          IntervalSide side, ScaleFn&& threshold) {
  const Index n = theta.size();
  Index above = 0;
  Index below = 0;
  for (Index k = 0; k < n; ++k) {
    if (k == m || !context.is_identifiable(k)) continue;
    const double gap = theta[k] - theta[m];
    const double t = threshold(m, k);
    if (gap > t) ++above;
    if (gap < -t) ++below;
  }
  RankInterval out;
  out.item = m;
  out.side = side;
  out.lower = 1 + above;
  out.upper = side == IntervalSide::kTwoSided ? n - below : n;
  return out;
}

}  // namespace

std::vector<RankInterval> rank_intervals(const ScoreEstimate& estimate,
                                         const InferenceContext& context,
                                         const std::vector<Index>& item_set,
                                         const CriticalValue& critical_value,
                                         const BootstrapConfig& config) {
  check_estimate(estimate, context);
  if (critical_value.item_set != item_set) {
    throw ContractError("critical value was computed for a different item set");
  }
  if (critical_value.normalizer != config.normalizer) {
    throw ContractError("critical value was computed with the " +
                        to_string(critical_value.normalizer) + " normalizer, not " +
                        to_string(config.normalizer));
  }
  check_item_set(context, item_set);
  const Eigen::VectorXd& theta = estimate.theta_hat.values();
  const IntervalSide side = critical_value.side == Side::kTwoSided ? IntervalSide::kTwoSided
                                                                   : IntervalSide::kLeftSided;
  // The Bonferroni normalizer depends on alpha; use the one it was built with.
  auto threshold = [&](Index m, Index k) {
    return difference_scale(context, m, k, critical_value.normalizer, critical_value.alpha,
                            critical_value.c0) *
           critical_value.value;
  };
  std::vector<RankInterval> out;
  out.reserve(item_set.size());
  for (Index m : item_set) out.push_back(interval_for(theta, context, m, side, threshold));
  return out;
}

RankInterval bonferroni_intervals(const ScoreEstimate& estimate, const InferenceContext& context,
                                  Index item, double alpha, double c0) {
  check_estimate(estimate, context);
  check_item_set(context, {item});
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double spread = (1.0 + c0) * std::sqrt(2.0 * std::log(static_cast<double>(context.n())));
  auto threshold = [&](Index m, Index k) {
    return z / context.rho[m] + spread / context.rho[k];
  };
  return interval_for(estimate.theta_hat.values(), context, item, IntervalSide::kTwoSided,
                      threshold);
}

TopKDecision top_k_test(const ScoreEstimate& estimate, const InferenceContext& context,
                        Index item, Index k, double alpha, const BootstrapConfig& config,
                        const Stream& rng) {
  check_estimate(estimate, context);
  if (k < 1 || k > context.n()) throw ValidationError("K must lie in [1, n]");
  BootstrapConfig one_sided = config;
  one_sided.side = Side::kOneSided;
  one_sided.alpha = alpha;
  const std::vector<Index> set{item};
  TopKDecision out;
  out.item = item;
  out.k = k;
  out.critical_value = bootstrap_critical_value(context, set, one_sided, rng);
  out.lower_bound = rank_intervals(estimate, context, set, out.critical_value, one_sided)[0].lower;
  out.reject = out.lower_bound > k;
  return out;
}

ScreeningResult sure_screening(const ScoreEstimate& estimate, const InferenceContext& context,
                               Index k, double alpha, const BootstrapConfig& config,
                               const Stream& rng) {
  check_estimate(estimate, context);
  const Index n = context.n();
  if (k < 1 || k > n) throw ValidationError("K must lie in [1, n]");
  std::vector<Index> all;
  for (Index m = 0; m < n; ++m) {
    if (context.is_identifiable(m)) all.push_back(m);
  }
  const Eigen::VectorXd& theta = estimate.theta_hat.values();

  BootstrapConfig one_sided = config;
  one_sided.side = Side::kOneSided;
  one_sided.alpha = alpha;
  ScreeningResult out;
  out.k = k;
  out.critical_value = bootstrap_critical_value(context, all, one_sided, rng.split(0));
  const auto bounds = rank_intervals(estimate, context, all, out.critical_value, one_sided);
  std::vector<bool> excluded(static_cast<std::size_t>(n), false);
  for (const RankInterval& r : bounds) {
    if (r.lower > k) excluded[static_cast<std::size_t>(r.item)] = true;
  }
  // Items without comparisons cannot be ruled out.
  for (Index m = 0; m < n; ++m) {
    if (!excluded[static_cast<std::size_t>(m)]) out.selected.push_back(m);
  }

  BootstrapConfig unit = one_sided;
  unit.normalizer = Normalizer::kUnit;
  out.unit_critical_value = bootstrap_critical_value(context, all, unit, rng.split(1));
  const double unit_threshold =
      out.unit_critical_value.value / std::sqrt(static_cast<double>(context.trials));
  // With a common threshold the lower bounds are monotone in the estimated
  // scores, so walking the estimated ranking finds the last admitted item.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return theta[a] > theta[b]; });
  for (Index r = 0; r < n; ++r) {
    const Index m = order[static_cast<std::size_t>(r)];
    const Index lower =
        rank_lower_bound(theta, context, m, [&](Index, Index) { return unit_threshold; });
    if (lower <= k) out.d_hat = r + 1;
  }
  return out;
}

}  // namespace rankinfer
