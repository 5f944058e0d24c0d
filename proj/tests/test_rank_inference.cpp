#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "rankinfer/normal.hpp"
#include "rankinfer/rank_inference.hpp"

using namespace rankinfer;
using testing_helpers::small_instance;

namespace {

struct Fitted {
  Simulation sim;
  ScoreEstimate est;
  InferenceContext ctx;
};

Fitted fitted(Index n, double p, int trials, std::uint64_t seed) {
  Simulation sim = small_instance(n, 3, p, trials, seed);
  ScoreEstimate est = fit_mle(sim.data);
  InferenceContext ctx = build_context(sim.data, est.theta_hat);
  return {std::move(sim), std::move(est), std::move(ctx)};
}

std::vector<Index> identifiable(const InferenceContext& ctx) {
  std::vector<Index> out;
  for (Index m = 0; m < ctx.n(); ++m) {
    if (ctx.is_identifiable(m)) out.push_back(m);
  }
  return out;
}

CriticalValue with_value(CriticalValue cv, double value) {
  cv.value = value;
  return cv;
}

}  // namespace

TEST_CASE("extreme thresholds") {
  const Fitted f = fitted(10, 1.0, 10, 3);
  const auto set = identifiable(f.ctx);
  REQUIRE(set.size() == 10);
  BootstrapConfig c;
  c.draws = 200;
  const CriticalValue cv = bootstrap_critical_value(f.ctx, set, c);
  const auto ranks = point_ranks(f.est.theta_hat.values());

  for (const RankInterval& r : rank_intervals(f.est, f.ctx, set, with_value(cv, 1e12), c)) {
    CHECK(r.lower == 1);
    CHECK(r.upper == 10);
  }
  for (const RankInterval& r : rank_intervals(f.est, f.ctx, set, with_value(cv, 0.0), c)) {
    CHECK(r.lower == ranks[static_cast<std::size_t>(r.item)]);
    CHECK(r.upper == ranks[static_cast<std::size_t>(r.item)]);
    CHECK(r.length() == 0);
  }
}

TEST_CASE("critical value must match the request") {
  const Fitted f = fitted(8, 1.0, 10, 4);
  BootstrapConfig c;
  c.draws = 200;
  const CriticalValue cv = bootstrap_critical_value(f.ctx, {0, 1}, c);
  CHECK_THROWS_AS(rank_intervals(f.est, f.ctx, {0, 2}, cv, c), ContractError);
  BootstrapConfig other = c;
  other.normalizer = Normalizer::kBonferroniEta;
  CHECK_THROWS_AS(rank_intervals(f.est, f.ctx, {0, 1}, cv, other), ContractError);
  const Fitted g = fitted(9, 1.0, 10, 4);
  CHECK_THROWS_AS(rank_intervals(g.est, f.ctx, {0, 1}, cv, c), ContractError);
}

TEST_CASE("interval invariants on random instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Fitted f = fitted(25, 0.15, 15, seed);
    const auto ranks = point_ranks(f.est.theta_hat.values());
    std::vector<Index> set;
    for (Index m : identifiable(f.ctx)) {
      if (m % 3 == static_cast<Index>(seed % 3)) set.push_back(m);
    }
    if (set.empty()) continue;
    for (Normalizer n : {Normalizer::kSigmaHat, Normalizer::kBonferroniEta}) {
      for (Side side : {Side::kTwoSided, Side::kOneSided}) {
        BootstrapConfig c;
        c.draws = 200;
        c.seed = seed;
        c.normalizer = n;
        c.side = side;
        const auto cv = bootstrap_critical_value(f.ctx, set, c);
        const auto out = rank_intervals(f.est, f.ctx, set, cv, c);
        REQUIRE(out.size() == set.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
          const RankInterval& r = out[i];
          CHECK(r.item == set[i]);
          CHECK(1 <= r.lower);
          CHECK(r.lower <= ranks[static_cast<std::size_t>(r.item)]);
          CHECK(ranks[static_cast<std::size_t>(r.item)] <= r.upper);
          CHECK(r.upper <= 25);
          if (side == Side::kOneSided) {
            CHECK(r.upper == 25);
            CHECK(r.side == IntervalSide::kLeftSided);
          }
        }
      }
    }
  }
}

TEST_CASE("intervals are nested in alpha on shared draws") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Fitted f = fitted(20, 0.2, 20, seed);
    const auto set = identifiable(f.ctx);
    BootstrapConfig c;
    c.draws = 1000;
    for (Normalizer n : {Normalizer::kSigmaHat, Normalizer::kBonferroniEta}) {
      c.normalizer = n;
      // The Bonferroni normalizer itself depends on alpha, so each level
      // rebuilds the distribution from the same stream.
      std::vector<RankInterval> wide;
      for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
        c.alpha = alpha;
        const auto dist = bootstrap_distribution(f.ctx, set, c, Stream(seed));
        const auto out = rank_intervals(f.est, f.ctx, set, dist.critical_value(alpha), c);
        if (!wide.empty()) {
          for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(wide[i].lower <= out[i].lower);
            CHECK(out[i].upper <= wide[i].upper);
          }
        }
        wide = out;
      }
    }
  }
}

TEST_CASE("bonferroni baseline") {
  SUBCASE("two items by hand") {
    // Item 0 wins three quarters of the trials, so theta_0 - theta_1 = log 3
    // and S = p(1 - p) = 3/16 for both items.
    const double gap = std::log(3.0);
    const double spread = 2.0 * std::sqrt(2.0 * std::log(2.0));
    for (int trials : {40, 160}) {
      ComparisonHypergraph g(2, 2, {Edge({0, 1})});
      TrialMatrix t(1, trials);
      for (Index l = 0; l < trials; ++l) t(0, l) = 4 * l < 3 * trials ? 0 : 1;
      const ComparisonDataset d(g, t);
      const ScoreEstimate est = fit_mle(d);
      const InferenceContext ctx = build_context(d, est.theta_hat);
      const double rho = std::sqrt(trials * 3.0 / 16.0);
      CHECK(ctx.rho[0] == doctest::Approx(rho));
      CHECK(est.theta_hat[0] - est.theta_hat[1] == doctest::Approx(gap));
      // 1.575 at L = 40 and 0.788 at L = 160.
      const double threshold = normal_quantile(0.975) / rho + spread / rho;
      const RankInterval r1 = bonferroni_intervals(est, ctx, 1, 0.05);
      const RankInterval r0 = bonferroni_intervals(est, ctx, 0, 0.05);
      if (threshold > gap) {
        CHECK(trials == 40);
        CHECK(r1.lower == 1);
        CHECK(r0.upper == 2);
      } else {
        CHECK(trials == 160);
        CHECK(r1.lower == 2);
        CHECK(r0.upper == 1);
      }
      CHECK(r1.upper == 2);
      CHECK(r0.lower == 1);
    }
  }
  SUBCASE("huge rho collapses to the point rank") {
    Fitted f = fitted(12, 1.0, 10, 5);
    f.ctx.rho.setConstant(1e12);
    const auto ranks = point_ranks(f.est.theta_hat.values());
    for (Index m = 0; m < 12; ++m) {
      const RankInterval r = bonferroni_intervals(f.est, f.ctx, m, 0.05);
      CHECK(r.lower == ranks[static_cast<std::size_t>(m)]);
      CHECK(r.upper == ranks[static_cast<std::size_t>(m)]);
    }
  }
}

TEST_CASE("top-K test") {
  const Fitted f = fitted(15, 0.5, 10, 7);
  BootstrapConfig c;
  c.draws = 300;
  for (Index m = 0; m < 15; ++m) {
    const TopKDecision d = top_k_test(f.est, f.ctx, m, 15, 0.05, c, Stream(1));
    CHECK_FALSE(d.reject);
    CHECK(d.lower_bound <= 15);
    CHECK(d.critical_value.side == Side::kOneSided);
  }
  CHECK_THROWS_AS(top_k_test(f.est, f.ctx, 0, 0, 0.05, c, Stream(1)), ValidationError);

  // With negligible residuals every threshold vanishes and the item with
  // point rank 10 is rejected for K = 5.
  Fitted g = fitted(15, 0.5, 10, 8);
  g.ctx.xi_hat *= 1e-9;
  const auto ranks = point_ranks(g.est.theta_hat.values());
  const Index tenth =
      static_cast<Index>(std::find(ranks.begin(), ranks.end(), Index{10}) - ranks.begin());
  const TopKDecision d = top_k_test(g.est, g.ctx, tenth, 5, 0.05, c, Stream(1));
  CHECK(d.reject);
  CHECK(d.lower_bound == 10);
}

TEST_CASE("sure screening") {
  const Index k = 4;
  BootstrapConfig c;
  c.draws = 300;
  SUBCASE("huge thresholds keep every item") {
    Fitted f = fitted(12, 0.6, 10, 2);
    f.ctx.xi_hat *= 1e9;
    const ScreeningResult s = sure_screening(f.est, f.ctx, k, 0.05, c, Stream(4));
    CHECK(s.selected.size() == 12);
    CHECK(s.d_hat == 12);
  }
  SUBCASE("vanishing thresholds keep the estimated top K") {
    Fitted f = fitted(12, 0.6, 10, 2);
    f.ctx.xi_hat *= 1e-9;
    const ScreeningResult s = sure_screening(f.est, f.ctx, k, 0.05, c, Stream(4));
    const auto ranks = point_ranks(f.est.theta_hat.values());
    REQUIRE(s.selected.size() == static_cast<std::size_t>(k));
    for (Index m : s.selected) CHECK(ranks[static_cast<std::size_t>(m)] <= k);
    CHECK(s.d_hat == k);
  }
  SUBCASE("screening set contains the estimated top K") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Fitted f = fitted(20, 0.2, 20, seed);
      const ScreeningResult s = sure_screening(f.est, f.ctx, k, 0.05, c, Stream(seed));
      const auto ranks = point_ranks(f.est.theta_hat.values());
      for (Index m = 0; m < 20; ++m) {
        if (ranks[static_cast<std::size_t>(m)] <= k) {
          CHECK(std::find(s.selected.begin(), s.selected.end(), m) != s.selected.end());
        }
      }
      CHECK(s.d_hat >= k);
      CHECK(s.unit_critical_value.normalizer == Normalizer::kUnit);
      CHECK(s.critical_value.side == Side::kOneSided);
    }
  }
}
