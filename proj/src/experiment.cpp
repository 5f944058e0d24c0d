#include "rankinfer/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rankinfer/bootstrap.hpp"
#include "rankinfer/mle.hpp"
#include "rankinfer/normal.hpp"
#include "rankinfer/rank_inference.hpp"
#include "rankinfer/report.hpp"
#include "rankinfer/uq.hpp"

namespace rankinfer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kNames[] = {"rate-vs-p",  "rate-vs-L",   "normality",      "pp-plot",
                              "ci-table",   "power-table", "screening-table"};

// Independent seed per grid point.
std::uint64_t grid_seed(std::uint64_t seed, std::size_t g) {
  return splitmix64(seed ^ splitmix64(0x5851f42d4c957f2dULL + g));
}

SimulationConfig simulation_for(const ExperimentSpec& spec, double p, int trials, std::size_t g) {
  SimulationConfig cfg;
  cfg.n = spec.n;
  cfg.m_way = spec.m_way;
  cfg.edge_prob = p;
  cfg.trials = trials;
  cfg.seed = grid_seed(spec.seed, g);
  cfg.score_spec = spec.truth;
  cfg.kappa_max = spec.kappa_max;
  return cfg;
}

FitConfig fit_config(const ExperimentSpec& spec) {
  FitConfig fit;
  fit.kappa_max = spec.kappa_max;
  return fit;
}

BootstrapConfig bootstrap_config(const ExperimentSpec& spec, std::uint64_t seed) {
  BootstrapConfig bc;
  bc.draws = spec.bootstrap_draws;
  bc.alpha = spec.alpha;
  bc.c0 = spec.c0;
  bc.seed = seed;
  return bc;
}

double edge_count_constant(const ExperimentSpec& spec) {
  return binomial_coefficient(spec.n - 1, spec.m_way - 1);
}

// theta_hat - theta* on the items that have comparisons, after centering
// both over that set; NaN elsewhere.
Eigen::VectorXd aligned_error(const ScoreEstimate& est, const ScoreVector& truth) {
  const Index n = truth.size();
  std::vector<bool> keep(static_cast<std::size_t>(n), true);
  for (Index m : est.non_identifiable_items) keep[static_cast<std::size_t>(m)] = false;
  double mean_hat = 0.0;
  double mean_true = 0.0;
  Index count = 0;
  for (Index i = 0; i < n; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    mean_hat += est.theta_hat[i];
    mean_true += truth[i];
    ++count;
  }
  mean_hat /= static_cast<double>(std::max<Index>(count, 1));
  mean_true /= static_cast<double>(std::max<Index>(count, 1));
  Eigen::VectorXd out = Eigen::VectorXd::Constant(n, kNaN);
  for (Index i = 0; i < n; ++i) {
    if (keep[static_cast<std::size_t>(i)]) {
      out[i] = (est.theta_hat[i] - mean_hat) - (truth[i] - mean_true);
    }
  }
  return out;
}

bool contains(const std::vector<Index>& v, Index x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Per-replication bootstrap stream for grid point g.
Stream bootstrap_stream(const ExperimentSpec& spec, std::size_t g, int rep) {
  return Stream(grid_seed(spec.seed, g), static_cast<std::uint64_t>(rep), StreamTag::kBootstrap);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names(std::begin(kNames), std::end(kNames));
  return names;
}

ExperimentSpec ExperimentSpec::defaults(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  s.truth = ScoreSpec::uniform_range(2.0, 4.0);
  if (name == "rate-vs-p") {
    s.trials = 20;
  } else if (name == "rate-vs-L") {
    s.edge_prob = 0.05;
  } else if (name == "normality") {
    s.p_grid = {0.008, 0.015, 0.03};
    s.l_grid = {5, 10, 20};
    s.item = 1;
  } else if (name == "pp-plot") {
    s.trials = 80;
    s.edge_prob = 0.05;
    s.bootstrap_draws = 300;
    s.item = 1;
    for (int i = 1; i <= 18; ++i) s.alphas.push_back(0.05 * i);
  } else if (name == "ci-table" || name == "power-table" || name == "screening-table") {
    s.trials = 80;
    s.p_grid = {0.05, 0.10, 0.15};
    s.truth = ScoreSpec::grid(4.0, 2.0);
    s.item = 10;
    s.k = 10;
    s.ks = {5, 10, 15};
  } else {
    throw ValidationError("unknown experiment '" + name + "'");
  }
  return s;
}

void ExperimentSpec::resolve() {
  const double c = binomial_coefficient(n - 1, m_way - 1);
  const double log_n = std::log(static_cast<double>(n));
  auto rate_grid = [&] {
    std::vector<double> rates;
    for (int i = 0; i < grid_points; ++i) {
      const double t = grid_points > 1 ? static_cast<double>(i) / (grid_points - 1) : 0.0;
      rates.push_back(rate_lo + (rate_hi - rate_lo) * t);
    }
    return rates;
  };
  if (name == "rate-vs-p" && p_grid.empty()) {
    for (double r : rate_grid()) p_grid.push_back(std::min(1.0, log_n / (c * trials * r * r)));
  }
  if (name == "rate-vs-L" && l_grid.empty()) {
    for (double r : rate_grid()) {
      l_grid.push_back(std::max(1, static_cast<int>(std::lround(log_n / (c * edge_prob * r * r)))));
    }
  }
}

void ExperimentSpec::validate() const {
  require(std::find(experiment_names().begin(), experiment_names().end(), name) !=
              experiment_names().end(),
          "unknown experiment '" + name + "'");
  require(n >= 2, "n must be at least 2");
  require(m_way >= 2 && m_way <= n, "M must lie in [2, n]");
  require(replications >= 1, "replications must be at least 1");
  require(trials >= 1, "L must be positive");
  require(edge_prob > 0.0 && edge_prob <= 1.0, "p must lie in (0, 1]");
  require(bootstrap_draws >= 100, "bootstrap draws must be at least 100");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  require(item >= 1 && item <= n, "item must lie in [1, n]");
  require(k >= 1 && k <= n, "K must lie in [1, n]");
  require(grid_points >= 1, "grid points must be at least 1");
  for (double p : p_grid) require(p > 0.0 && p <= 1.0, "p grid values must lie in (0, 1]");
  for (int l : l_grid) require(l >= 1, "L grid values must be positive");
  for (double a : alphas) require(a > 0.0 && a < 1.0, "alpha levels must lie in (0, 1)");
  for (Index kk : ks) require(kk >= 1 && kk <= n, "K values must lie in [1, n]");
  if (name == "rate-vs-p" || name == "normality" || name == "ci-table" ||
      name == "power-table" || name == "screening-table") {
    require(!p_grid.empty(), "p grid is empty");
  }
  if (name == "rate-vs-L" || name == "normality") require(!l_grid.empty(), "L grid is empty");
  if (name == "pp-plot") require(!alphas.empty(), "alpha grid is empty");
  if (name == "screening-table") require(!ks.empty(), "K grid is empty");
  if (name == "power-table") require(k >= 3 && k + 5 <= n, "power-table needs 3 <= K <= n - 5");
}

void to_json(nlohmann::json& j, const ExperimentSpec& s) {
  j = nlohmann::json{{"name", s.name},
                     {"n", s.n},
                     {"m_way", s.m_way},
                     {"trials", s.trials},
                     {"edge_prob", s.edge_prob},
                     {"p_grid", s.p_grid},
                     {"l_grid", s.l_grid},
                     {"grid_points", s.grid_points},
                     {"rate_lo", s.rate_lo},
                     {"rate_hi", s.rate_hi},
                     {"replications", s.replications},
                     {"bootstrap_draws", s.bootstrap_draws},
                     {"alpha", s.alpha},
                     {"alphas", s.alphas},
                     {"c0", s.c0},
                     {"item", s.item},
                     {"k", s.k},
                     {"ks", s.ks},
                     {"score_spec", s.truth},
                     {"kappa_max", s.kappa_max},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, ExperimentSpec& s) {
  s = ExperimentSpec::defaults(j.at("name").get<std::string>());
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  opt("n", s.n);
  opt("m_way", s.m_way);
  opt("trials", s.trials);
  opt("edge_prob", s.edge_prob);
  opt("p_grid", s.p_grid);
  opt("l_grid", s.l_grid);
  opt("grid_points", s.grid_points);
  opt("rate_lo", s.rate_lo);
  opt("rate_hi", s.rate_hi);
  opt("replications", s.replications);
  opt("bootstrap_draws", s.bootstrap_draws);
  opt("alpha", s.alpha);
  opt("alphas", s.alphas);
  opt("c0", s.c0);
  opt("item", s.item);
  opt("k", s.k);
  opt("ks", s.ks);
  opt("score_spec", s.truth);
  opt("kappa_max", s.kappa_max);
  opt("seed", s.seed);
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
  const std::string text = nlohmann::json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int worker_count() {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RANKINFER_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) workers = cap;
  }
  return std::max(workers, 1);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<RateRow> run_rate(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.resolve();
  spec.validate();
  const bool sweep_p = spec.name == "rate-vs-p";
  const std::size_t points = sweep_p ? spec.p_grid.size() : spec.l_grid.size();
  const double c = edge_count_constant(spec);
  const double log_n = std::log(static_cast<double>(spec.n));
  const int reps = spec.replications;
  std::vector<RateRow> rows(points * static_cast<std::size_t>(reps));
  for (std::size_t g = 0; g < points; ++g) {
    const double p = sweep_p ? spec.p_grid[g] : spec.edge_prob;
    const int trials = sweep_p ? spec.trials : spec.l_grid[g];
    const SimulationConfig cfg = simulation_for(spec, p, trials, g);
    const double denom = c * p * trials;
    parallel_for(reps, [&](int rep) {
      const Simulation sim = simulate(cfg, static_cast<std::uint64_t>(rep));
      const ScoreEstimate est = fit_mle(sim.data, fit_config(spec));
      const Eigen::VectorXd err = aligned_error(est, sim.truth);
      double linf = 0.0;
      double l2 = 0.0;
      for (Index i = 0; i < err.size(); ++i) {
        if (std::isnan(err[i])) continue;
        linf = std::max(linf, std::abs(err[i]));
        l2 += err[i] * err[i];
      }
      rows[g * static_cast<std::size_t>(reps) + static_cast<std::size_t>(rep)] =
          RateRow{sweep_p ? p : static_cast<double>(trials), rep, linf, std::sqrt(l2),
                  std::sqrt(log_n / denom), std::sqrt(static_cast<double>(spec.n) / denom)};
    });
  }
  return rows;
}

std::vector<NormalityRow> run_normality(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.resolve();
  spec.validate();
  const int reps = spec.replications;
  const Index item = spec.item - 1;
  std::vector<NormalityRow> rows;
  std::size_t g = 0;
  for (double p : spec.p_grid) {
    for (int trials : spec.l_grid) {
      const SimulationConfig cfg = simulation_for(spec, p, trials, g++);
      std::vector<NormalityRow> block(static_cast<std::size_t>(reps));
      parallel_for(reps, [&](int rep) {
        const Simulation sim = simulate(cfg, static_cast<std::uint64_t>(rep));
        const ScoreEstimate est = fit_mle(sim.data, fit_config(spec));
        const Eigen::VectorXd err = aligned_error(est, sim.truth);
        double z = kNaN;
        if (!std::isnan(err[item])) {
          const double share = information_share(sim.data, est.theta_hat.values(), item);
          z = std::sqrt(trials * share) * err[item];
        }
        block[static_cast<std::size_t>(rep)] = NormalityRow{p, trials, rep, z};
      });
      rows.insert(rows.end(), block.begin(), block.end());
    }
  }
  return rows;
}

std::vector<PpRow> run_pp_plot(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.resolve();
  spec.validate();
  const int reps = spec.replications;
  const std::vector<Index> set{spec.item - 1};
  const SimulationConfig cfg = simulation_for(spec, spec.edge_prob, spec.trials, 0);
  // exceed[rep][a] = 1 when the observed statistic exceeds the level-a critical value.
  std::vector<std::vector<char>> exceed(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int rep) {
    const Simulation sim = simulate(cfg, static_cast<std::uint64_t>(rep));
    const ScoreEstimate est = fit_mle(sim.data, fit_config(spec));
    const InferenceContext ctx = build_context(sim.data, est.theta_hat);
    const BootstrapConfig bc = bootstrap_config(spec, spec.seed);
    const BootstrapDistribution dist =
        bootstrap_distribution(ctx, set, bc, bootstrap_stream(spec, 0, rep));
    const double t = observed_statistic(ctx, set, sim.truth, bc);
    auto& row = exceed[static_cast<std::size_t>(rep)];
    for (double a : spec.alphas) row.push_back(t > dist.critical_value(a).value ? 1 : 0);
  });
  std::vector<PpRow> rows;
  for (std::size_t a = 0; a < spec.alphas.size(); ++a) {
    int hits = 0;
    for (const auto& r : exceed) hits += r[a];
    rows.push_back(PpRow{spec.alphas[a], static_cast<double>(hits) / reps, reps});
  }
  return rows;
}

std::vector<CiRow> run_ci_table(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.resolve();
  spec.validate();
  const int reps = spec.replications;
  const Index item = spec.item - 1;
  const std::vector<Index> set{item};
  const double baseline_cut =
      (1.0 + spec.c0) * std::sqrt(2.0 * std::log(static_cast<double>(spec.n)));
  std::vector<CiRow> rows;
  for (std::size_t g = 0; g < spec.p_grid.size(); ++g) {
    const double p = spec.p_grid[g];
    const SimulationConfig cfg = simulation_for(spec, p, spec.trials, g);
    struct Outcome {
      int cover_theta[3];
      int cover_rank[3];
      Index length[3];
      int shorter[2];
    };
    std::vector<Outcome> out(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](int rep) {
      const Simulation sim = simulate(cfg, static_cast<std::uint64_t>(rep));
      const Index true_rank = point_ranks(sim.truth.values())[static_cast<std::size_t>(item)];
      const ScoreEstimate est = fit_mle(sim.data, fit_config(spec));
      const InferenceContext ctx = build_context(sim.data, est.theta_hat);
      const Stream rng = bootstrap_stream(spec, g, rep);
      Outcome& o = out[static_cast<std::size_t>(rep)];
      const Normalizer normalizers[2] = {Normalizer::kSigmaHat, Normalizer::kBonferroniEta};
      const RankInterval baseline = bonferroni_intervals(est, ctx, item, spec.alpha, spec.c0);
      for (int v = 0; v < 2; ++v) {
        BootstrapConfig bc = bootstrap_config(spec, spec.seed);
        bc.normalizer = normalizers[v];
        const CriticalValue cv =
            bootstrap_critical_value(ctx, set, bc, rng.split(static_cast<std::uint64_t>(v)));
        const RankInterval r = rank_intervals(est, ctx, set, cv, bc)[0];
        o.cover_theta[v] = observed_statistic(ctx, set, sim.truth, bc) <= cv.value;
        o.cover_rank[v] = r.lower <= true_rank && true_rank <= r.upper;
        o.length[v] = r.length();
        o.shorter[v] = r.length() < baseline.length();
      }
      BootstrapConfig eta = bootstrap_config(spec, spec.seed);
      eta.normalizer = Normalizer::kBonferroniEta;
      o.cover_theta[2] = observed_statistic(ctx, set, sim.truth, eta) <= baseline_cut;
      o.cover_rank[2] = baseline.lower <= true_rank && true_rank <= baseline.upper;
      o.length[2] = baseline.length();
    });
    const char* names[3] = {"sigma-hat", "bonferroni", "bonferroni-baseline"};
    for (int v = 0; v < 3; ++v) {
      double theta = 0.0, rank = 0.0, length = 0.0, shorter = 0.0;
      for (const Outcome& o : out) {
        theta += o.cover_theta[v];
        rank += o.cover_rank[v];
        length += static_cast<double>(o.length[v]);
        if (v < 2) shorter += o.shorter[v];
      }
      rows.push_back(CiRow{names[v], p, theta / reps, rank / reps, length / reps,
                           v < 2 ? shorter / reps : kNaN, reps});
    }
  }
  return rows;
}

std::vector<PowerRow> run_power_table(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.resolve();
  spec.validate();
  const int reps = spec.replications;
  const Index k = spec.k;
  constexpr int kOffsets = 8;  // m = K-2 .. K+5
  std::vector<PowerRow> rows;
  for (std::size_t g = 0; g < spec.p_grid.size(); ++g) {
    const double p = spec.p_grid[g];
    const SimulationConfig cfg = simulation_for(spec, p, spec.trials, g);
    std::vector<std::array<int, 2 * kOffsets>> out(static_cast<std::size_t>(reps));
    Eigen::VectorXd truth_values;
    std::mutex truth_mutex;
    parallel_for(reps, [&](int rep) {
      const Simulation sim = simulate(cfg, static_cast<std::uint64_t>(rep));
      const ScoreEstimate est = fit_mle(sim.data, fit_config(spec));
      const InferenceContext ctx = build_context(sim.data, est.theta_hat);
      const Stream rng = bootstrap_stream(spec, g, rep);
      BootstrapConfig bc = bootstrap_config(spec, spec.seed);
      bc.side = Side::kOneSided;
      // Items are addressed by true rank.
      std::vector<Index> by_rank(static_cast<std::size_t>(spec.n));
      const auto ranks = point_ranks(sim.truth.values());
      for (Index i = 0; i < spec.n; ++i) by_rank[static_cast<std::size_t>(ranks[i] - 1)] = i;
      auto& o = out[static_cast<std::size_t>(rep)];
      for (int j = 0; j < kOffsets; ++j) {
        const Index m = by_rank[static_cast<std::size_t>(k - 3 + j)];
        const TopKDecision d =
            top_k_test(est, ctx, m, k, spec.alpha, bc, rng.split(static_cast<std::uint64_t>(j)));
        o[static_cast<std::size_t>(j)] = d.reject;
        o[static_cast<std::size_t>(kOffsets + j)] =
            observed_statistic(ctx, {m}, sim.truth, bc) > d.critical_value.value;
      }
      if (rep == 0) {
        std::lock_guard<std::mutex> lock(truth_mutex);
        truth_values = sim.truth.values();
      }
    });
    std::vector<double> sorted(truth_values.data(), truth_values.data() + truth_values.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (int j = 0; j < kOffsets; ++j) {
      const Index m = k - 2 + j;
      double reject = 0.0, diff = 0.0;
      for (const auto& o : out) {
        reject += o[static_cast<std::size_t>(j)];
        diff += o[static_cast<std::size_t>(kOffsets + j)];
      }
      // The gap is read from replication 0; it is fixed unless the truth is random.
      const double gap = sorted[static_cast<std::size_t>(m - 1)] - sorted[static_cast<std::size_t>(k - 1)];
      rows.push_back(PowerRow{p, k, m, m - k, gap, reject / reps, diff / reps, reps});
    }
  }
  return rows;
}

std::vector<ScreeningRow> run_screening_table(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.resolve();
  spec.validate();
  const int reps = spec.replications;
  const std::size_t nk = spec.ks.size();
  std::vector<ScreeningRow> rows;
  for (std::size_t g = 0; g < spec.p_grid.size(); ++g) {
    const double p = spec.p_grid[g];
    const SimulationConfig cfg = simulation_for(spec, p, spec.trials, g);
    struct Outcome {
      int cover_theta = 0;
      std::vector<int> cover_rank;
      std::vector<double> size;
      std::vector<double> d_hat;
    };
    std::vector<Outcome> out(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](int rep) {
      const Simulation sim = simulate(cfg, static_cast<std::uint64_t>(rep));
      const ScoreEstimate est = fit_mle(sim.data, fit_config(spec));
      const InferenceContext ctx = build_context(sim.data, est.theta_hat);
      // The same stream for every K: the critical values do not depend on K.
      const Stream rng = bootstrap_stream(spec, g, rep);
      BootstrapConfig bc = bootstrap_config(spec, spec.seed);
      bc.side = Side::kOneSided;
      const auto ranks = point_ranks(sim.truth.values());
      Outcome& o = out[static_cast<std::size_t>(rep)];
      for (std::size_t j = 0; j < nk; ++j) {
        const Index kk = spec.ks[j];
        const ScreeningResult s = sure_screening(est, ctx, kk, spec.alpha, bc, rng);
        bool covered = true;
        for (Index i = 0; i < spec.n; ++i) {
          if (ranks[static_cast<std::size_t>(i)] <= kk && !contains(s.selected, i)) covered = false;
        }
        o.cover_rank.push_back(covered);
        o.size.push_back(static_cast<double>(s.selected.size()));
        o.d_hat.push_back(static_cast<double>(s.d_hat));
        if (j == 0) {
          o.cover_theta =
              observed_statistic(ctx, s.critical_value.item_set, sim.truth, bc) <= s.critical_value.value;
        }
      }
    });
    for (std::size_t j = 0; j < nk; ++j) {
      double theta = 0.0, rank = 0.0, size = 0.0, d_hat = 0.0;
      for (const Outcome& o : out) {
        theta += o.cover_theta;
        rank += o.cover_rank[j];
        size += o.size[j];
        d_hat += o.d_hat[j];
      }
      rows.push_back(
          ScreeningRow{p, spec.ks[j], theta / reps, rank / reps, size / reps, d_hat / reps, reps});
    }
  }
  return rows;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

ExperimentTable run_experiment(const ExperimentSpec& spec) {
  ExperimentTable t;
  auto f = [](double x) { return format_double(x); };
  auto i = [](auto x) { return std::to_string(x); };
  if (spec.name == "rate-vs-p" || spec.name == "rate-vs-L") {
    t.columns = {spec.name == "rate-vs-p" ? "p" : "L", "rep", "linf_err", "l2_err", "theory_rate",
                 "theory_rate_l2"};
    for (const RateRow& r : run_rate(spec)) {
      t.rows.push_back({f(r.grid_value), i(r.rep), f(r.linf_err), f(r.l2_err), f(r.theory_rate),
                        f(r.theory_rate_l2)});
    }
  } else if (spec.name == "normality") {
    t.columns = {"p", "L", "rep", "z"};
    for (const NormalityRow& r : run_normality(spec)) {
      t.rows.push_back({f(r.p), i(r.trials), i(r.rep), f(r.z)});
    }
  } else if (spec.name == "pp-plot") {
    t.columns = {"alpha", "empirical", "replications"};
    for (const PpRow& r : run_pp_plot(spec)) {
      t.rows.push_back({f(r.alpha), f(r.empirical), i(r.replications)});
    }
  } else if (spec.name == "ci-table") {
    t.columns = {"normalizer", "p", "ec_theta", "ec_rank", "length", "frac_shorter_than_baseline",
                 "replications"};
    for (const CiRow& r : run_ci_table(spec)) {
      t.rows.push_back({r.normalizer, f(r.p), f(r.ec_theta), f(r.ec_rank), f(r.length),
                        f(r.frac_shorter_than_baseline), i(r.replications)});
    }
  } else if (spec.name == "power-table") {
    t.columns = {"p", "k", "m", "offset", "theta_gap", "reject_rate", "score_diff_reject_rate",
                 "replications"};
    for (const PowerRow& r : run_power_table(spec)) {
      t.rows.push_back({f(r.p), i(r.k), i(r.m), i(r.offset), f(r.theta_gap), f(r.reject_rate),
                        f(r.score_diff_reject_rate), i(r.replications)});
    }
  } else if (spec.name == "screening-table") {
    t.columns = {"p", "k", "ec_theta", "ec_rank", "mean_size", "mean_d_hat", "replications"};
    for (const ScreeningRow& r : run_screening_table(spec)) {
      t.rows.push_back({f(r.p), i(r.k), f(r.ec_theta), f(r.ec_rank), f(r.mean_size),
                        f(r.mean_d_hat), i(r.replications)});
    }
  } else {
    throw ValidationError("unknown experiment '" + spec.name + "'");
  }
  return t;
}

void write_csv(std::ostream& out, const ExperimentSpec& spec, const ExperimentTable& table) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(spec_hash(spec)));
  out << "# rankinfer " << kVersion << " experiment=" << spec.name << " spec_hash=" << hash << '\n';
  out << "# spec " << nlohmann::json(spec).dump() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
    out << '\n';
  }
}

}  // namespace rankinfer
