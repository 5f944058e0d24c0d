#ifndef RANKINFER_EXPERIMENT_HPP
#define RANKINFER_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rankinfer/simulate.hpp"

namespace rankinfer {

// Monte Carlo experiments. Each one writes a tidy CSV; the columns are
// listed with the row types below and in the README.
//
//   rate-vs-p, rate-vs-L   estimation error against the rate sqrt(log n / (C p L)),
//                          C = binom(n-1, M-1), one row per replication
//   normality              rho_item(theta_hat) (theta_hat_item - theta*_item), one row
//                          per replication and (p, L) pair
//   pp-plot                rejection frequency of the bootstrap test per nominal alpha
//   ci-table               coverage and length of two-sided rank intervals
//   power-table            rejection rates of the top-K test
//   screening-table        coverage and size of the top-K screening set
struct ExperimentSpec {
  std::string name;
  Index n = 60;
  Index m_way = 3;
  int trials = 20;         // L where it is held fixed
  double edge_prob = 0.05; // p where it is held fixed
  std::vector<double> p_grid;
  std::vector<int> l_grid;
  // When the swept grid is empty, rate experiments place `grid_points`
  // theoretical rates evenly on [rate_lo, rate_hi] and solve for p or L.
  int grid_points = 8;
  double rate_lo = 0.04;
  double rate_hi = 0.18;
  int replications = 500;
  int bootstrap_draws = 500;
  double alpha = 0.05;
  std::vector<double> alphas;  // pp-plot levels
  double c0 = 1.0;
  Index item = 1;              // 1-based
  Index k = 10;
  std::vector<Index> ks;       // screening-table
  ScoreSpec truth;
  double kappa_max = kDefaultKappaMax;
  std::uint64_t seed = 1;
  std::string output;          // not part of the hash

  /// Defaults for a named experiment; throws on an unknown name.
  static ExperimentSpec defaults(const std::string& name);
  /// Fills derived grids; called by the runners.
  void resolve();
  void validate() const;
};

const std::vector<std::string>& experiment_names();

void to_json(nlohmann::json& j, const ExperimentSpec& spec);
void from_json(const nlohmann::json& j, ExperimentSpec& spec);

/// 64-bit FNV-1a of the experiment's canonical JSON (output path excluded).
std::uint64_t spec_hash(const ExperimentSpec& spec);

/// Worker count: RANKINFER_THREADS if set, else the hardware concurrency.
int worker_count();

/// Calls fn(i) for i in [0, count) across worker threads. The first
/// exception thrown by any call is rethrown.
void parallel_for(int count, const std::function<void(int)>& fn);

struct RateRow {
  double grid_value;  // p or L
  int rep;
  double linf_err;
  double l2_err;
  double theory_rate;     // sqrt(log n / (C p L))
  double theory_rate_l2;  // sqrt(n / (C p L))
};

struct NormalityRow {
  double p;
  int trials;
  int rep;
  double z;  // NaN when the item has no comparisons
};

struct PpRow {
  double alpha;
  double empirical;
  int replications;
};

struct CiRow {
  std::string normalizer;  // sigma-hat, bonferroni, bonferroni-baseline
  double p;
  double ec_theta;
  double ec_rank;
  double length;
  double frac_shorter_than_baseline;  // NaN for the baseline row
  int replications;
};

struct PowerRow {
  double p;
  Index k;
  Index m;
  Index offset;  // m - k
  double theta_gap;  // theta*_m - theta*_k
  double reject_rate;
  double score_diff_reject_rate;
  int replications;
};

struct ScreeningRow {
  double p;
  Index k;
  double ec_theta;
  double ec_rank;
  double mean_size;
  double mean_d_hat;
  int replications;
};

std::vector<RateRow> run_rate(const ExperimentSpec& spec);
std::vector<NormalityRow> run_normality(const ExperimentSpec& spec);
std::vector<PpRow> run_pp_plot(const ExperimentSpec& spec);
std::vector<CiRow> run_ci_table(const ExperimentSpec& spec);
std::vector<PowerRow> run_power_table(const ExperimentSpec& spec);
std::vector<ScreeningRow> run_screening_table(const ExperimentSpec& spec);

struct ExperimentTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Runs the named experiment and formats its rows.
ExperimentTable run_experiment(const ExperimentSpec& spec);

/// Header comment (version, spec hash, spec JSON), column line, rows.
void write_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentTable& table);

/// Shortest round-trip decimal form; "nan" and "inf" for non-finite values.
std::string format_double(double x);

}  // namespace rankinfer

#endif  // RANKINFER_EXPERIMENT_HPP
