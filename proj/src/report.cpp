#include "rankinfer/report.hpp"

#include <cmath>
#include <limits>

#include "rankinfer/uq.hpp"

namespace rankinfer {

namespace {

nlohmann::json finite_or_null(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      out.push_back(x);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

std::vector<double> null_as_infinity(const nlohmann::json& j) {
  std::vector<double> out;
  for (const auto& x : j) {
    out.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
  }
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const TopKEntry& t) {
  j = {{"item", t.item}, {"k", t.k}, {"reject", t.reject}, {"lower_bound", t.lower_bound}};
}

void from_json(const nlohmann::json& j, TopKEntry& t) {
  j.at("item").get_to(t.item);
  j.at("k").get_to(t.k);
  j.at("reject").get_to(t.reject);
  j.at("lower_bound").get_to(t.lower_bound);
}

void to_json(nlohmann::json& j, const ScreeningEntry& s) {
  j = {{"k", s.k},
       {"selected", s.selected},
       {"d_hat", s.d_hat},
       {"unit_critical_value", s.unit_critical_value},
       {"seed", s.seed},
       {"unit_seed", s.unit_seed}};
}

void from_json(const nlohmann::json& j, ScreeningEntry& s) {
  j.at("k").get_to(s.k);
  j.at("selected").get_to(s.selected);
  j.at("d_hat").get_to(s.d_hat);
  j.at("unit_critical_value").get_to(s.unit_critical_value);
  j.at("seed").get_to(s.seed);
  j.at("unit_seed").get_to(s.unit_seed);
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = nlohmann::json::object();
  j["version"] = r.version;
  j["command"] = r.command;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["item_ids"] = r.item_ids;
  j["theta_hat"] = r.theta_hat;
  j["se"] = finite_or_null(r.se);
  j["rank_point"] = r.rank_point;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["non_identifiable"] = r.non_identifiable;
  j["items"] = r.items;
  j["rank_ci"] = r.rank_ci;
  j["interval_side"] = r.interval_side;
  j["critical_value"] = r.critical_value ? nlohmann::json(*r.critical_value) : nlohmann::json();
  j["alpha"] = r.alpha;
  j["bootstrap_draws"] = r.bootstrap_draws;
  j["normalizer"] = r.normalizer;
  j["tests"] = r.tests;
  j["screening"] = r.screening ? nlohmann::json(*r.screening) : nlohmann::json();
  j["warnings"] = r.warnings;
  if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
}

void from_json(const nlohmann::json& j, RunReport& r) {
  j.at("version").get_to(r.version);
  j.at("command").get_to(r.command);
  r.config = j.at("config");
  j.at("seed").get_to(r.seed);
  j.at("item_ids").get_to(r.item_ids);
  j.at("theta_hat").get_to(r.theta_hat);
  r.se = null_as_infinity(j.at("se"));
  j.at("rank_point").get_to(r.rank_point);
  j.at("converged").get_to(r.converged);
  j.at("iterations").get_to(r.iterations);
  j.at("non_identifiable").get_to(r.non_identifiable);
  j.at("items").get_to(r.items);
  j.at("rank_ci").get_to(r.rank_ci);
  j.at("interval_side").get_to(r.interval_side);
  r.critical_value.reset();
  if (!j.at("critical_value").is_null()) r.critical_value = j.at("critical_value").get<double>();
  j.at("alpha").get_to(r.alpha);
  j.at("bootstrap_draws").get_to(r.bootstrap_draws);
  j.at("normalizer").get_to(r.normalizer);
  j.at("tests").get_to(r.tests);
  r.screening.reset();
  if (!j.at("screening").is_null()) r.screening = j.at("screening").get<ScreeningEntry>();
  j.at("warnings").get_to(r.warnings);
  r.wall_clock_seconds.reset();
  if (j.contains("wall_clock_seconds")) r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
}

void fill_estimate(RunReport& report, const ComparisonDataset& data, const ScoreEstimate& estimate) {
  const Eigen::VectorXd& theta = estimate.theta_hat.values();
  const Eigen::VectorXd shares = information_shares(data, theta);
  const double trials = data.trials();
  report.item_ids = data.item_ids();
  report.theta_hat.assign(theta.data(), theta.data() + theta.size());
  report.se.clear();
  for (Index m = 0; m < theta.size(); ++m) {
    report.se.push_back(shares[m] > 0.0 ? 1.0 / std::sqrt(trials * shares[m])
                                        : std::numeric_limits<double>::infinity());
  }
  report.rank_point = point_ranks(theta);
  report.converged = estimate.converged;
  report.iterations = estimate.iterations;
  report.non_identifiable.clear();
  for (Index m : estimate.non_identifiable_items) {
    report.non_identifiable.push_back(data.item_ids()[static_cast<std::size_t>(m)]);
  }
}

void fill_intervals(RunReport& report, const ComparisonDataset& data,
                    const std::vector<RankInterval>& intervals, const CriticalValue& critical_value) {
  report.items.clear();
  report.rank_ci.clear();
  for (const RankInterval& r : intervals) {
    report.items.push_back(data.item_ids()[static_cast<std::size_t>(r.item)]);
    report.rank_ci.push_back({r.lower, r.upper});
  }
  report.interval_side =
      critical_value.side == Side::kTwoSided ? "two-sided" : "left-sided";
  report.critical_value = critical_value.value;
  report.alpha = critical_value.alpha;
  report.bootstrap_draws = critical_value.draws_used;
  report.seed = critical_value.seed;
  report.normalizer = to_string(critical_value.normalizer);
}

}  // namespace rankinfer
