#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "rankinfer/bootstrap.hpp"
#include "rankinfer/mle.hpp"
#include "rankinfer/normal.hpp"

using namespace rankinfer;
using testing_helpers::small_instance;

namespace {

InferenceContext fitted_context(const ComparisonDataset& data) {
  return build_context(data, fit_mle(data).theta_hat);
}

// Repeats every trial column `times` times.
ComparisonDataset replicate_trials(const ComparisonDataset& data, int times) {
  const TrialMatrix& t = data.trial_winners();
  TrialMatrix big(t.rows(), t.cols() * times);
  for (int r = 0; r < times; ++r) big.middleCols(r * t.cols(), t.cols()) = t;
  return ComparisonDataset(data.graph(), big);
}

}  // namespace

TEST_CASE("empirical quantile takes the ceiling order statistic") {
  const std::array<double, 5> draws{1, 2, 3, 4, 5};
  CHECK(empirical_quantile(draws, 0.2) == 4.0);
  CHECK(empirical_quantile(draws, 0.5) == 3.0);
  CHECK(empirical_quantile(draws, 0.99) == 1.0);
  CHECK_THROWS_AS(empirical_quantile(std::span<const double>{}, 0.1), ValidationError);
}

TEST_CASE("config validation and normalizer names") {
  BootstrapConfig c;
  CHECK_NOTHROW(c.validate());
  c.draws = 99;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.alpha = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.c0 = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  for (Normalizer n : {Normalizer::kSigmaHat, Normalizer::kBonferroniEta, Normalizer::kUnit}) {
    CHECK(parse_normalizer(to_string(n)) == n);
  }
  CHECK_THROWS_AS(parse_normalizer("studentized"), ValidationError);
}

TEST_CASE("zero residuals give a zero critical value") {
  InferenceContext ctx;
  ctx.trials = 20;
  ctx.s_share = Eigen::VectorXd::Ones(4);
  ctx.rho = Eigen::VectorXd::Constant(4, std::sqrt(20.0));
  ctx.xi_hat = Eigen::MatrixXd::Zero(20, 4);
  ctx.theta_used = ScoreVector(Eigen::VectorXd::Zero(4));
  ctx.identifiable.assign(4, true);
  for (double alpha : {0.01, 0.3, 0.9}) {
    BootstrapConfig c;
    c.alpha = alpha;
    c.draws = 200;
    CHECK(bootstrap_critical_value(ctx, {0, 2}, c).value == 0.0);
    c.normalizer = Normalizer::kBonferroniEta;
    CHECK(bootstrap_critical_value(ctx, {1}, c).value == 0.0);
  }
}

TEST_CASE("critical values are deterministic and monotone in alpha") {
  const Simulation sim = small_instance(15, 3, 0.3, 25, 9);
  const InferenceContext ctx = fitted_context(sim.data);
  BootstrapConfig c;
  c.draws = 500;
  c.seed = 12;
  for (Normalizer n : {Normalizer::kSigmaHat, Normalizer::kBonferroniEta}) {
    c.normalizer = n;
    const auto a = bootstrap_critical_value(ctx, {0, 3}, c);
    const auto b = bootstrap_critical_value(ctx, {0, 3}, c);
    CHECK(a.value == b.value);
    CHECK(std::isfinite(a.value));
    CHECK(a.draws_used == 500);
    CHECK(a.item_set == std::vector<Index>{0, 3});
    c.seed = 13;
    CHECK(bootstrap_critical_value(ctx, {0, 3}, c).value != a.value);
    c.seed = 12;

    const auto dist = bootstrap_distribution(ctx, {0, 3}, c, Stream(5));
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha = 0.01; alpha < 0.95; alpha += 0.02) {
      const double v = dist.critical_value(alpha).value;
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("single pair against the Gaussian quantile") {
  const Simulation sim = small_instance(2, 2, 1.0, 400, 3);
  const InferenceContext ctx = fitted_context(sim.data);
  BootstrapConfig c;
  c.draws = 100000;
  c.alpha = 0.05;
  const double quantile = bootstrap_critical_value(ctx, {0}, c).value;
  // Conditionally on xi_hat the statistic is |N(0, v)| with v the mean square
  // of the standardized residual differences.
  const Eigen::VectorXd d = (ctx.xi_hat.col(1) - ctx.xi_hat.col(0)) / ctx.sigma_hat(0, 1);
  const double v = d.squaredNorm() / static_cast<double>(d.size());
  CHECK(std::abs(quantile - 1.959964 * std::sqrt(v)) <= 0.05 * 1.959964 * std::sqrt(v));
}

TEST_CASE("one-sided critical value does not exceed the two-sided one") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Simulation sim = small_instance(12, 3, 0.4, 20, seed);
    const InferenceContext ctx = fitted_context(sim.data);
    std::vector<Index> set;
    for (Index m = 0; m < 12; ++m) {
      if (ctx.is_identifiable(m)) set.push_back(m);
    }
    BootstrapConfig c;
    c.draws = 10000;
    const Stream rng(seed);
    const double two = bootstrap_critical_value(ctx, set, c, rng).value;
    c.side = Side::kOneSided;
    const double one = bootstrap_critical_value(ctx, set, c, rng).value;
    CHECK(one <= two);
  }
}

TEST_CASE("item sets with non-identifiable items are rejected") {
  ComparisonHypergraph g(4, 2, {Edge({0, 1}), Edge({1, 2})});
  TrialMatrix t(2, 3);
  t << 0, 1, 0, 1, 1, 0;
  const InferenceContext ctx = fitted_context(ComparisonDataset(g, t));
  BootstrapConfig c;
  CHECK_THROWS_AS(bootstrap_critical_value(ctx, {0, 3}, c), NonIdentifiableError);
  CHECK_THROWS_AS(bootstrap_critical_value(ctx, {}, c), ValidationError);
  CHECK_THROWS_AS(bootstrap_critical_value(ctx, {7}, c), ValidationError);
  try {
    bootstrap_critical_value(ctx, {3}, c);
  } catch (const NonIdentifiableError& e) {
    CHECK(std::string(e.what()).find("item 3") != std::string::npos);
  }
}

TEST_CASE("observed statistic examples") {
  const Simulation sim = small_instance(10, 3, 0.5, 15, 4);
  const ScoreEstimate est = fit_mle(sim.data);
  const InferenceContext at_hat = build_context(sim.data, est.theta_hat);
  BootstrapConfig c;
  CHECK(observed_statistic(at_hat, {0, 1, 2}, est.theta_hat, c) == 0.0);

  // One alternative and unit normalizer.
  const auto two = small_instance(2, 2, 1.0, 30, 6);
  const ScoreEstimate e2 = fit_mle(two.data);
  const InferenceContext c2 = build_context(two.data, e2.theta_hat);
  c.normalizer = Normalizer::kUnit;
  const double expect =
      std::sqrt(30.0) * std::abs(e2.theta_hat[1] - e2.theta_hat[0] - (two.truth[1] - two.truth[0]));
  CHECK(observed_statistic(c2, {0}, two.truth, c) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("bonferroni scale matches its closed form") {
  const Simulation sim = small_instance(9, 3, 0.5, 12, 2);
  const InferenceContext ctx = fitted_context(sim.data);
  const double z = normal_quantile(0.975);
  const double spread = 2.0 * std::sqrt(2.0 * std::log(9.0));
  CHECK(difference_scale(ctx, 0, 1, Normalizer::kBonferroniEta, 0.05, 1.0) ==
        doctest::Approx(z / (ctx.rho[0] * spread) + 1.0 / ctx.rho[1]));
  CHECK(difference_scale(ctx, 0, 1, Normalizer::kSigmaHat, 0.05, 1.0) ==
        doctest::Approx(ctx.sigma_hat(0, 1) / std::sqrt(12.0)));
  CHECK(difference_scale(ctx, 0, 1, Normalizer::kUnit, 0.05, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(12.0)));
}

TEST_CASE("thresholds are in score units for both normalizers") {
  // Replicating every trial four times leaves the standardized residuals
  // unchanged and doubles rho, so thresholds should halve.
  const Simulation sim = small_instance(10, 3, 0.5, 15, 8);
  const ScoreEstimate est = fit_mle(sim.data);
  const ComparisonDataset big = replicate_trials(sim.data, 4);
  const InferenceContext small_ctx = build_context(sim.data, est.theta_hat);
  const InferenceContext big_ctx = build_context(big, est.theta_hat);
  for (Normalizer n : {Normalizer::kSigmaHat, Normalizer::kBonferroniEta}) {
    BootstrapConfig c;
    c.draws = 20000;
    c.normalizer = n;
    const double t_small =
        difference_scale(small_ctx, 0, 1, n, c.alpha, c.c0) *
        bootstrap_critical_value(small_ctx, {0}, c).value;
    const double t_big = difference_scale(big_ctx, 0, 1, n, c.alpha, c.c0) *
                         bootstrap_critical_value(big_ctx, {0}, c).value;
    CHECK(t_big / t_small == doctest::Approx(0.5).epsilon(0.05));
  }
}
