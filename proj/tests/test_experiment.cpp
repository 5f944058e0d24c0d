#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rankinfer/experiment.hpp"

using namespace rankinfer;

namespace {

std::string csv_of(const ExperimentSpec& spec) {
  std::ostringstream out;
  write_csv(out, spec, run_experiment(spec));
  return out.str();
}

ExperimentSpec small(const std::string& name) {
  ExperimentSpec s = ExperimentSpec::defaults(name);
  s.n = 20;
  s.replications = 3;
  s.bootstrap_draws = 100;
  return s;
}

}  // namespace

TEST_CASE("spec validation and json") {
  CHECK_THROWS_AS(ExperimentSpec::defaults("table-9"), ValidationError);
  for (const std::string& name : experiment_names()) {
    ExperimentSpec s = ExperimentSpec::defaults(name);
    s.resolve();
    CHECK_NOTHROW(s.validate());
    const nlohmann::json j = s;
    const ExperimentSpec back = j.get<ExperimentSpec>();
    CHECK(nlohmann::json(back) == j);
    CHECK(spec_hash(back) == spec_hash(s));
  }
  ExperimentSpec s = ExperimentSpec::defaults("rate-vs-p");
  s.replications = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = ExperimentSpec::defaults("rate-vs-p");
  const auto h = spec_hash(s);
  s.output = "elsewhere.csv";
  CHECK(spec_hash(s) == h);
  s.seed = 2;
  CHECK(spec_hash(s) != h);
}

TEST_CASE("rate grid resolution") {
  ExperimentSpec s = ExperimentSpec::defaults("rate-vs-p");
  s.grid_points = 2;
  s.resolve();
  REQUIRE(s.p_grid.size() == 2);
  // p solves sqrt(log n / (C p L)) = rate at the two ends.
  const double c = 1711.0;
  CHECK(std::sqrt(std::log(60.0) / (c * s.p_grid[0] * 20)) == doctest::Approx(0.04));
  CHECK(std::sqrt(std::log(60.0) / (c * s.p_grid[1] * 20)) == doctest::Approx(0.18));
}

TEST_CASE("rate experiment rows") {
  ExperimentSpec s = small("rate-vs-p");
  s.p_grid = {0.2, 0.4};
  const auto rows = run_rate(s);
  CHECK(rows.size() == 6);
  for (const RateRow& r : rows) {
    CHECK(r.linf_err >= 0);
    CHECK(r.l2_err >= r.linf_err);
    CHECK(r.theory_rate > 0);
  }
  const ExperimentTable t = run_experiment(s);
  CHECK(t.columns ==
        std::vector<std::string>{"p", "rep", "linf_err", "l2_err", "theory_rate", "theory_rate_l2"});
  CHECK(t.rows.size() == 6);
}

TEST_CASE("table experiments have the documented columns") {
  ExperimentSpec ci = small("ci-table");
  ci.p_grid = {0.3};
  ci.item = 3;
  const ExperimentTable t = run_experiment(ci);
  CHECK(t.columns == std::vector<std::string>{"normalizer", "p", "ec_theta", "ec_rank", "length",
                                              "frac_shorter_than_baseline", "replications"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][0] == "sigma-hat");
  CHECK(t.rows[2][0] == "bonferroni-baseline");

  ExperimentSpec power = small("power-table");
  power.p_grid = {0.3};
  power.k = 5;
  CHECK(run_power_table(power).size() == 8);

  ExperimentSpec scr = small("screening-table");
  scr.p_grid = {0.3};
  scr.ks = {2, 4};
  const auto rows = run_screening_table(scr);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean_size <= rows[1].mean_size);
}

TEST_CASE("pp-plot is monotone in alpha") {
  ExperimentSpec s = small("pp-plot");
  s.replications = 20;
  const auto rows = run_pp_plot(s);
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i - 1].alpha < rows[i].alpha);
    CHECK(rows[i - 1].empirical <= rows[i].empirical);
  }
}

TEST_CASE("csv output is independent of the worker count") {
  ExperimentSpec s = small("normality");
  s.p_grid = {0.2};
  s.l_grid = {5, 10};
  s.replications = 8;
  setenv("RANKINFER_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  const std::string one = csv_of(s);
  setenv("RANKINFER_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  const std::string four = csv_of(s);
  unsetenv("RANKINFER_THREADS");
  CHECK(one == four);

  std::istringstream in(one);
  std::string header;
  std::getline(in, header);
  std::ostringstream hash;
  hash << std::hex;
  hash.width(16);
  hash.fill('0');
  hash << spec_hash(s);
  CHECK(header.find(std::string("rankinfer ") + "0.1.0") != std::string::npos);
  CHECK(header.find("spec_hash=" + hash.str()) != std::string::npos);
}

TEST_CASE("parallel_for propagates exceptions") {
  CHECK_THROWS_AS(parallel_for(10, [](int i) {
                    if (i == 7) throw ValidationError("boom");
                  }),
                  ValidationError);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(1.0 / 3)) == 1.0 / 3);
}
