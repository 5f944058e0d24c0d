#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "rankinfer/report.hpp"

using namespace rankinfer;

TEST_CASE("run report round-trips through json") {
  ComparisonHypergraph g(4, 2, {Edge({0, 1}), Edge({1, 2})});
  TrialMatrix t(2, 4);
  t << 0, 0, 1, 0, 1, 0, 1, 1;
  ComparisonDataset data(g, t);
  data.set_item_ids({"ann", "bo", "cy", "dee"});
  const ScoreEstimate est = fit_mle(data);

  RunReport r;
  r.command = "ci";
  r.config = {{"alpha", 0.1}, {"input", "x.csv"}};
  fill_estimate(r, data, est);
  CHECK(r.item_ids == data.item_ids());
  CHECK(std::isinf(r.se[3]));
  CHECK(r.non_identifiable == std::vector<std::string>{"dee"});
  const InferenceContext ctx = build_context(data, est.theta_hat);
  CHECK(r.se[1] == doctest::Approx(1.0 / ctx.rho[1]));

  BootstrapConfig bc;
  bc.draws = 100;
  const auto cv = bootstrap_critical_value(ctx, {0, 2}, bc);
  fill_intervals(r, data, rank_intervals(est, ctx, {0, 2}, cv, bc), cv);
  CHECK(r.items == std::vector<std::string>{"ann", "cy"});
  CHECK(r.interval_side == "two-sided");
  REQUIRE(r.critical_value.has_value());

  r.tests.push_back({"bo", 2, true, 3});
  r.screening = ScreeningEntry{2, {"ann", "bo"}, 2, 1.5, 7, 8};
  r.warnings.push_back("few trials");

  const nlohmann::json j = r;
  CHECK(j["se"][3].is_null());
  CHECK_FALSE(j.contains("wall_clock_seconds"));
  CHECK(j["version"] == kVersion);
  const RunReport back = j.get<RunReport>();
  CHECK(back == r);
  CHECK(nlohmann::json(back).dump() == j.dump());

  r.wall_clock_seconds = 0.25;
  CHECK(nlohmann::json(r).contains("wall_clock_seconds"));
  CHECK(nlohmann::json(r).get<RunReport>() == r);
}
