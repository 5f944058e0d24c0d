#ifndef RANKINFER_BOOTSTRAP_HPP
#define RANKINFER_BOOTSTRAP_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rankinfer/rng.hpp"
#include "rankinfer/uq.hpp"

namespace rankinfer {

/// Pairwise normalizer eta_mk for the max statistic.
///   kSigmaHat:     sigma_hat_mk = sqrt(1/S_m + 1/S_k)
///   kBonferroniEta: z_{1-alpha/2} / (rho_m (1 + c0) sqrt(2 log n)) + 1/rho_k
///   kUnit:         1 (used for the admission-count estimate)
enum class Normalizer { kSigmaHat, kBonferroniEta, kUnit };
enum class Side { kTwoSided, kOneSided };

std::string to_string(Normalizer normalizer);
std::string to_string(Side side);
Normalizer parse_normalizer(const std::string& name);

struct BootstrapConfig {
  int draws = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  Normalizer normalizer = Normalizer::kSigmaHat;
  double c0 = 1.0;
  Side side = Side::kTwoSided;

  void validate() const;
};

struct CriticalValue {
  double value = 0.0;
  int draws_used = 0;
  std::vector<Index> item_set;
  Normalizer normalizer = Normalizer::kSigmaHat;
  Side side = Side::kTwoSided;
  double alpha = 0.05;
  double c0 = 1.0;
  std::uint64_t seed = 0;
};

/// Scale tau_mk that turns a score difference into the statistic's units:
/// eta_mk / sqrt(L) for the sigma-hat and unit normalizers, eta_mk itself for
/// the Bonferroni normalizer (rho already carries sqrt(L)). Rank thresholds
/// are tau_mk * critical value.
double difference_scale(const InferenceContext& context, Index m, Index k,
                        Normalizer normalizer, double alpha, double c0);

/// The ceil((1 - alpha) B)-th order statistic of `sorted_draws`.
double empirical_quantile(std::span<const double> sorted_draws, double alpha);

/// Sorted bootstrap draws of the max statistic; critical values for several
/// alpha can be read off the same draws.
struct BootstrapDistribution {
  std::vector<double> sorted_draws;
  std::vector<Index> item_set;
  BootstrapConfig config;

  CriticalValue critical_value(double alpha) const;
};

/// Gaussian multiplier bootstrap. Draw b uses multipliers omega_1..omega_L
/// from `rng.split(b)`, shared by every pair (m, k).
BootstrapDistribution bootstrap_distribution(const InferenceContext& context,
                                             const std::vector<Index>& item_set,
                                             const BootstrapConfig& config, const Stream& rng);

/// Same as above with the stream derived from config.seed.
CriticalValue bootstrap_critical_value(const InferenceContext& context,
                                       const std::vector<Index>& item_set,
                                       const BootstrapConfig& config);
CriticalValue bootstrap_critical_value(const InferenceContext& context,
                                       const std::vector<Index>& item_set,
                                       const BootstrapConfig& config, const Stream& rng);

/// Observed max statistic against known true scores (simulation only):
/// max over m in the set and k != m of (theta_hat_k - theta_hat_m - (theta*_k - theta*_m)) / tau_mk,
/// in absolute value for the two-sided variant.
double observed_statistic(const InferenceContext& context, const std::vector<Index>& item_set,
                          const ScoreVector& truth, const BootstrapConfig& config);

/// Throws if an item is out of range or not identifiable.
void check_item_set(const InferenceContext& context, const std::vector<Index>& item_set);

}  // namespace rankinfer

#endif  // RANKINFER_BOOTSTRAP_HPP
