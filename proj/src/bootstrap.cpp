#include "rankinfer/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rankinfer/normal.hpp"

namespace rankinfer {

namespace {

constexpr Index kChunk = 128;

// Identifiable items other than m.
std::vector<Index> comparators(const InferenceContext& context, Index m) {
  std::vector<Index> out;
  for (Index k = 0; k < context.n(); ++k) {
    if (k != m && context.is_identifiable(k)) out.push_back(k);
  }
  return out;
}

}  // namespace

std::string to_string(Normalizer normalizer) {
  switch (normalizer) {
    case Normalizer::kSigmaHat: return "sigma-hat";
    case Normalizer::kBonferroniEta: return "bonferroni";
    case Normalizer::kUnit: return "unit";
  }
  return "";
}

std::string to_string(Side side) {
  return side == Side::kTwoSided ? "two-sided" : "one-sided";
}

Normalizer parse_normalizer(const std::string& name) {
  if (name == "sigma-hat") return Normalizer::kSigmaHat;
  if (name == "bonferroni" || name == "bonferroni-eta") return Normalizer::kBonferroniEta;
  if (name == "unit") return Normalizer::kUnit;
  throw ValidationError("unknown normalizer '" + name + "'");
}

void BootstrapConfig::validate() const {
  if (draws < 100) throw ValidationError("bootstrap draws must be at least 100");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (!(c0 > 0.0)) throw ValidationError("c0 must be positive");
}

void check_item_set(const InferenceContext& context, const std::vector<Index>& item_set) {
  if (item_set.empty()) throw ValidationError("item set is empty");
  for (Index m : item_set) {
    if (m < 0 || m >= context.n()) {
      throw ValidationError("item " + std::to_string(m) + " out of range");
    }
    if (!context.is_identifiable(m)) {
      throw NonIdentifiableError(m, "item " + std::to_string(m) +
                                        " has no comparisons and cannot be in the item set");
    }
  }
}

double difference_scale(const InferenceContext& context, Index m, Index k,
                        Normalizer normalizer, double alpha, double c0) {
  const double root_l = std::sqrt(static_cast<double>(context.trials));
  switch (normalizer) {
    case Normalizer::kSigmaHat:
      return context.sigma_hat(m, k) / root_l;
    case Normalizer::kUnit:
      return 1.0 / root_l;
    case Normalizer::kBonferroniEta: {
      const double z = normal_quantile(1.0 - alpha / 2.0);
      const double spread =
          (1.0 + c0) * std::sqrt(2.0 * std::log(static_cast<double>(context.n())));
      return z / (context.rho[m] * spread) + 1.0 / context.rho[k];
    }
  }
  return 1.0;
}

double empirical_quantile(std::span<const double> sorted_draws, double alpha) {
  if (sorted_draws.empty()) throw ValidationError("no bootstrap draws");
  const auto b = static_cast<double>(sorted_draws.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted_draws.size());
  return sorted_draws[rank - 1];
}

CriticalValue BootstrapDistribution::critical_value(double a) const {
  CriticalValue cv;
  cv.value = empirical_quantile(sorted_draws, a);
  cv.draws_used = static_cast<int>(sorted_draws.size());
  cv.item_set = item_set;
  cv.normalizer = config.normalizer;
  cv.side = config.side;
  cv.alpha = a;
  cv.c0 = config.c0;
  cv.seed = config.seed;
  return cv;
}

BootstrapDistribution bootstrap_distribution(const InferenceContext& context,
                                             const std::vector<Index>& item_set,
                                             const BootstrapConfig& config, const Stream& rng) {
  config.validate();
  check_item_set(context, item_set);
  const Index trials = context.xi_hat.rows();
  const double l = static_cast<double>(context.trials);

  // inv_scale[i][j] = 1 / (L tau_{m,k}) for m = item_set[i], k = others[i][j],
  // so that (W_k - W_m) * inv_scale is the pair statistic of one draw.
  const std::size_t sets = item_set.size();
  std::vector<std::vector<Index>> others(sets);
  std::vector<std::vector<double>> inv_scale(sets);
  for (std::size_t i = 0; i < sets; ++i) {
    const Index m = item_set[i];
    others[i] = comparators(context, m);
    for (Index k : others[i]) {
      inv_scale[i].push_back(
          1.0 / (l * difference_scale(context, m, k, config.normalizer, config.alpha, config.c0)));
    }
  }

  BootstrapDistribution dist;
  dist.item_set = item_set;
  dist.config = config;
  dist.sorted_draws.resize(static_cast<std::size_t>(config.draws));

  const bool two_sided = config.side == Side::kTwoSided;
  Eigen::MatrixXd omega(trials, kChunk);
  Eigen::MatrixXd weighted;
  for (Index start = 0; start < config.draws; start += kChunk) {
    const Index width = std::min<Index>(kChunk, config.draws - start);
    for (Index c = 0; c < width; ++c) {
      Stream draw_rng = rng.split(static_cast<std::uint64_t>(start + c));
      std::normal_distribution<double> normal;
      for (Index t = 0; t < trials; ++t) omega(t, c) = normal(draw_rng);
    }
    // weighted(k, b) = sum_l xi_hat(l, k) omega(l, b)
    weighted.noalias() = context.xi_hat.transpose() * omega.leftCols(width);
    for (Index c = 0; c < width; ++c) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < sets; ++i) {
        const double wm = weighted(item_set[i], c);
        const auto& ks = others[i];
        const auto& inv = inv_scale[i];
        for (std::size_t j = 0; j < ks.size(); ++j) {
          const double diff = (weighted(ks[j], c) - wm) * inv[j];
          // One-sided uses xi_m - xi_k, the sign of theta_hat_k - theta_hat_m.
          best = std::max(best, two_sided ? std::abs(diff) : -diff);
        }
      }
      dist.sorted_draws[static_cast<std::size_t>(start + c)] =
          std::isfinite(best) ? best : 0.0;
    }
  }
  std::sort(dist.sorted_draws.begin(), dist.sorted_draws.end());
  return dist;
}

CriticalValue bootstrap_critical_value(const InferenceContext& context,
                                       const std::vector<Index>& item_set,
                                       const BootstrapConfig& config, const Stream& rng) {
  return bootstrap_distribution(context, item_set, config, rng).critical_value(config.alpha);
}

CriticalValue bootstrap_critical_value(const InferenceContext& context,
                                       const std::vector<Index>& item_set,
                                       const BootstrapConfig& config) {
  const StreamTag tag =
      config.normalizer == Normalizer::kUnit ? StreamTag::kBootstrapUnit : StreamTag::kBootstrap;
  return bootstrap_critical_value(context, item_set, config, Stream(config.seed, 0, tag));
}

double observed_statistic(const InferenceContext& context, const std::vector<Index>& item_set,
                          const ScoreVector& truth, const BootstrapConfig& config) {
  check_item_set(context, item_set);
  if (truth.size() != context.n()) throw ValidationError("truth has the wrong dimension");
  const Eigen::VectorXd& est = context.theta_used.values();
  double best = -std::numeric_limits<double>::infinity();
  for (Index m : item_set) {
    for (Index k : comparators(context, m)) {
      const double err = est[k] - est[m] - (truth[k] - truth[m]);
      const double stat =
          err / difference_scale(context, m, k, config.normalizer, config.alpha, config.c0);
      best = std::max(best, config.side == Side::kTwoSided ? std::abs(stat) : stat);
    }
  }
  return std::isfinite(best) ? best : 0.0;
}

}  // namespace rankinfer
