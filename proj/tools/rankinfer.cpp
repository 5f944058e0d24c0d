// rankinfer: score estimation and rank inference from top-choice comparisons.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rankinfer/bootstrap.hpp"
#include "rankinfer/dataset_io.hpp"
#include "rankinfer/experiment.hpp"
#include "rankinfer/mle.hpp"
#include "rankinfer/rank_inference.hpp"
#include "rankinfer/report.hpp"
#include "rankinfer/simulate.hpp"
#include "rankinfer/uq.hpp"

namespace ri = rankinfer;

namespace {

struct Options {
  std::uint64_t seed = 1;
  double alpha = 0.05;
  int draws = 1000;
  std::string normalizer = "sigma-hat";
  double kappa_max = ri::kDefaultKappaMax;
  double c0 = 1.0;
  std::vector<std::string> items;
  ri::Index k = 0;
  std::string output;
  std::string input;
  std::string format;
  bool timing = false;

  // simulate
  ri::Index n = 60;
  ri::Index m_way = 3;
  double p = 0.05;
  int trials = 20;
  std::string scores = "uniform:2,4";
  std::string config;

  // experiment
  std::string name;
  int replications = 0;
  std::vector<double> p_grid;
  std::vector<int> l_grid;
  int grid_points = 0;
  std::string spec;
};

void add_shared(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
  cmd->add_option("--bootstrap-draws", o.draws, "Bootstrap draws B")->capture_default_str();
  cmd->add_option("--normalizer", o.normalizer, "sigma-hat or bonferroni")
      ->check(CLI::IsMember({"sigma-hat", "bonferroni"}))
      ->capture_default_str();
  cmd->add_option("--kappa-max", o.kappa_max, "Bound on the score range")->capture_default_str();
  cmd->add_option("--c0", o.c0, "Constant of the Bonferroni normalizer")->capture_default_str();
  cmd->add_option("--items", o.items, "Comma-separated item ids")->delimiter(',');
  cmd->add_option("--k", o.k, "K for top-K tests and screening");
  cmd->add_option("--output,-o", o.output, "Output file (default: stdout)");
  cmd->add_option("--input,-i", o.input, "Dataset file");
  cmd->add_option("--format", o.format, "trial-csv, aggregate-csv or json");
  cmd->add_flag("--timing", o.timing, "Record wall-clock time in the report");
}

void emit(const Options& o, const std::string& text) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw ri::ValidationError("cannot write " + o.output);
  out << text;
  if (!out) throw ri::ResourceError("failed writing " + o.output);
}

ri::ScoreSpec parse_scores(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ri::ValidationError("--scores must read uniform:a,b or grid:a,b");
  }
  const std::string kind = text.substr(0, colon);
  std::istringstream in(text.substr(colon + 1));
  double a = 0.0, b = 0.0;
  char comma = 0;
  if (!(in >> a >> comma >> b) || comma != ',') {
    throw ri::ValidationError("--scores must read uniform:a,b or grid:a,b");
  }
  if (kind == "uniform") return ri::ScoreSpec::uniform_range(a, b);
  if (kind == "grid") return ri::ScoreSpec::grid(a, b);
  throw ri::ValidationError("unknown score kind '" + kind + "'");
}

ri::DatasetFormat dataset_format(const Options& o) {
  return o.format.empty() ? ri::infer_format(o.input) : ri::parse_format(o.format);
}

ri::ComparisonDataset load(const Options& o, std::vector<std::string>& warnings) {
  if (o.input.empty()) throw ri::ValidationError("--input is required");
  ri::ComparisonDataset data = ri::load_dataset(o.input, dataset_format(o), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return data;
}

std::vector<ri::Index> resolve_items(const ri::ComparisonDataset& data,
                                     const std::vector<std::string>& ids) {
  std::vector<ri::Index> out;
  for (const std::string& id : ids) {
    auto m = data.find_item(id);
    if (!m) throw ri::ValidationError("unknown item id '" + id + "'");
    out.push_back(*m);
  }
  return out;
}

void warn_short_trials(const ri::ComparisonDataset& data, std::vector<std::string>& warnings) {
  const double log_n = std::log(static_cast<double>(data.graph().n()));
  if (data.trials() < log_n * log_n) {
    std::ostringstream msg;
    msg << "L = " << data.trials() << " is below (log n)^2 = " << log_n * log_n
        << "; the bootstrap calibration may be poor";
    warnings.push_back(msg.str());
    std::cerr << "warning: " << msg.str() << '\n';
  }
}

ri::BootstrapConfig bootstrap_config(const Options& o) {
  ri::BootstrapConfig bc;
  bc.draws = o.draws;
  bc.alpha = o.alpha;
  bc.seed = o.seed;
  bc.normalizer = ri::parse_normalizer(o.normalizer);
  bc.c0 = o.c0;
  bc.validate();
  return bc;
}

nlohmann::json config_echo(const Options& o) {
  return {{"input", o.input},   {"format", o.format},       {"seed", o.seed},
          {"alpha", o.alpha},   {"bootstrap_draws", o.draws}, {"normalizer", o.normalizer},
          {"kappa_max", o.kappa_max}, {"c0", o.c0},         {"items", o.items},
          {"k", o.k}};
}

// Shared front half of fit/ci/test-topk/screen.
struct Fitted {
  ri::ComparisonDataset data;
  ri::ScoreEstimate estimate;
  ri::RunReport report;
};

Fitted fit(const Options& o, const std::string& command) {
  Fitted f;
  f.data = load(o, f.report.warnings);
  ri::FitConfig fc;
  fc.kappa_max = o.kappa_max;
  fc.validate();
  f.estimate = ri::fit_mle(f.data, fc);
  f.report.command = command;
  f.report.config = config_echo(o);
  f.report.seed = o.seed;
  f.report.alpha = o.alpha;
  f.report.normalizer = o.normalizer;
  ri::fill_estimate(f.report, f.data, f.estimate);
  if (!f.estimate.converged) {
    f.report.warnings.push_back("optimizer stopped before reaching the gradient tolerance");
  }
  return f;
}

std::string dump(const ri::RunReport& report) { return nlohmann::json(report).dump(2) + "\n"; }

using Clock = std::chrono::steady_clock;

void finish(const Options& o, ri::RunReport& report, Clock::time_point start) {
  if (o.timing) {
    report.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  }
  emit(o, dump(report));
}

int run_simulate(const Options& o) {
  ri::SimulationConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ri::ValidationError("cannot open " + o.config);
    try {
      cfg = nlohmann::json::parse(in).get<ri::SimulationConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw ri::ValidationError(std::string("bad simulation config: ") + e.what());
    }
  } else {
    cfg.n = o.n;
    cfg.m_way = o.m_way;
    cfg.edge_prob = o.p;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.score_spec = parse_scores(o.scores);
  }
  cfg.kappa_max = o.kappa_max;
  const ri::Simulation sim = ri::simulate(cfg);
  const ri::DatasetFormat format = o.format.empty() ? ri::DatasetFormat::kJson : ri::parse_format(o.format);
  std::ostringstream out;
  if (format == ri::DatasetFormat::kJson) {
    nlohmann::json j = ri::dataset_to_json(sim.data);
    j["truth"] = std::vector<double>(sim.truth.values().data(),
                                     sim.truth.values().data() + sim.truth.size());
    j["simulation"] = cfg;
    out << j.dump(1) << '\n';
  } else {
    ri::write_dataset(out, sim.data, format);
  }
  emit(o, out.str());
  return 0;
}

int run_fit(const Options& o) {
  const auto start = Clock::now();
  Fitted f = fit(o, "fit");
  finish(o, f.report, start);
  return 0;
}

int run_ci(const Options& o) {
  const auto start = Clock::now();
  Fitted f = fit(o, "ci");
  warn_short_trials(f.data, f.report.warnings);
  const ri::InferenceContext ctx = ri::build_context(f.data, f.estimate.theta_hat);
  std::vector<ri::Index> set = resolve_items(f.data, o.items);
  if (set.empty()) {
    for (ri::Index m = 0; m < ctx.n(); ++m) {
      if (ctx.is_identifiable(m)) set.push_back(m);
    }
  }
  const ri::BootstrapConfig bc = bootstrap_config(o);
  const ri::CriticalValue cv = ri::bootstrap_critical_value(ctx, set, bc);
  ri::fill_intervals(f.report, f.data, ri::rank_intervals(f.estimate, ctx, set, cv, bc), cv);
  finish(o, f.report, start);
  return 0;
}

int run_test_topk(const Options& o) {
  const auto start = Clock::now();
  if (o.k < 1) throw ri::ValidationError("--k is required");
  if (o.items.empty()) throw ri::ValidationError("--items is required");
  Fitted f = fit(o, "test-topk");
  warn_short_trials(f.data, f.report.warnings);
  const ri::InferenceContext ctx = ri::build_context(f.data, f.estimate.theta_hat);
  const ri::BootstrapConfig bc = bootstrap_config(o);
  const std::vector<ri::Index> set = resolve_items(f.data, o.items);
  std::vector<ri::RankInterval> bounds;
  ri::CriticalValue last;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const ri::Stream rng = ri::Stream(o.seed, 0, ri::StreamTag::kBootstrap).split(i);
    const ri::TopKDecision d = ri::top_k_test(f.estimate, ctx, set[i], o.k, o.alpha, bc, rng);
    f.report.tests.push_back({o.items[i], o.k, d.reject, d.lower_bound});
    bounds.push_back({set[i], d.lower_bound, ctx.n(), ri::IntervalSide::kLeftSided});
    last = d.critical_value;
  }
  // One critical value per tested item; the report carries the last one.
  ri::fill_intervals(f.report, f.data, bounds, last);
  finish(o, f.report, start);
  return 0;
}

int run_screen(const Options& o) {
  const auto start = Clock::now();
  if (o.k < 1) throw ri::ValidationError("--k is required");
  Fitted f = fit(o, "screen");
  warn_short_trials(f.data, f.report.warnings);
  const ri::InferenceContext ctx = ri::build_context(f.data, f.estimate.theta_hat);
  const ri::BootstrapConfig bc = bootstrap_config(o);
  const ri::Stream rng(o.seed, 0, ri::StreamTag::kBootstrap);
  const ri::ScreeningResult s = ri::sure_screening(f.estimate, ctx, o.k, o.alpha, bc, rng);
  ri::ScreeningEntry entry;
  entry.k = o.k;
  for (ri::Index m : s.selected) entry.selected.push_back(f.data.item_ids()[static_cast<std::size_t>(m)]);
  entry.d_hat = s.d_hat;
  entry.unit_critical_value = s.unit_critical_value.value;
  entry.seed = o.seed;
  entry.unit_seed = o.seed;
  f.report.screening = entry;
  f.report.config["streams"] = {{"screening", "bootstrap/0"}, {"admission", "bootstrap/1"}};
  std::vector<ri::RankInterval> bounds =
      ri::rank_intervals(f.estimate, ctx, s.critical_value.item_set, s.critical_value,
                         [&] {
                           ri::BootstrapConfig one = bc;
                           one.side = ri::Side::kOneSided;
                           return one;
                         }());
  ri::fill_intervals(f.report, f.data, bounds, s.critical_value);
  finish(o, f.report, start);
  return 0;
}

int run_experiment(const Options& o, const CLI::App& cmd) {
  ri::ExperimentSpec spec;
  if (!o.spec.empty()) {
    std::ifstream in(o.spec);
    if (!in) throw ri::ValidationError("cannot open " + o.spec);
    try {
      spec = nlohmann::json::parse(in).get<ri::ExperimentSpec>();
    } catch (const nlohmann::json::exception& e) {
      throw ri::ValidationError(std::string("bad experiment spec: ") + e.what());
    }
  } else {
    if (o.name.empty()) throw ri::ValidationError("--name is required");
    spec = ri::ExperimentSpec::defaults(o.name);
  }
  if (cmd.count("--seed")) spec.seed = o.seed;
  if (cmd.count("--alpha")) spec.alpha = o.alpha;
  if (cmd.count("--bootstrap-draws")) spec.bootstrap_draws = o.draws;
  if (cmd.count("--kappa-max")) spec.kappa_max = o.kappa_max;
  if (cmd.count("--c0")) spec.c0 = o.c0;
  if (cmd.count("--k")) spec.k = o.k;
  if (cmd.count("--replications")) spec.replications = o.replications;
  if (cmd.count("--p-grid")) spec.p_grid = o.p_grid;
  if (cmd.count("--l-grid")) spec.l_grid = o.l_grid;
  if (cmd.count("--grid-points")) spec.grid_points = o.grid_points;
  if (!o.items.empty()) {
    if (o.items.size() != 1) throw ri::ValidationError("experiments take a single --items entry");
    try {
      spec.item = std::stol(o.items[0]);
    } catch (const std::exception&) {
      throw ri::ValidationError("--items must be a 1-based item number for experiments");
    }
  }
  spec.output = o.output;
  spec.resolve();
  spec.validate();
  const ri::ExperimentTable table = ri::run_experiment(spec);
  std::ostringstream out;
  ri::write_csv(out, spec, table);
  emit(o, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score estimation and rank inference from top-choice comparisons"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  add_shared(simulate, o);
  simulate->add_option("--n", o.n, "Number of items")->capture_default_str();
  simulate->add_option("--m-way", o.m_way, "Items per comparison")->capture_default_str();
  simulate->add_option("--p", o.p, "Edge probability")->capture_default_str();
  simulate->add_option("--trials", o.trials, "Trials per edge")->capture_default_str();
  simulate->add_option("--scores", o.scores, "uniform:a,b or grid:a,b")->capture_default_str();
  simulate->add_option("--config", o.config, "Simulation config JSON (overrides the flags)");

  auto* fit_cmd = app.add_subcommand("fit", "Maximum likelihood scores and standard errors");
  add_shared(fit_cmd, o);
  auto* ci = app.add_subcommand("ci", "Simultaneous two-sided rank intervals");
  add_shared(ci, o);
  auto* topk = app.add_subcommand("test-topk", "Test whether items rank among the top K");
  add_shared(topk, o);
  auto* screen = app.add_subcommand("screen", "Screening set for the top K items");
  add_shared(screen, o);

  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment to CSV");
  add_shared(experiment, o);
  experiment->add_option("--name", o.name, "Experiment name")
      ->check(CLI::IsMember(ri::experiment_names()));
  experiment->add_option("--spec", o.spec, "Experiment spec JSON");
  experiment->add_option("--replications", o.replications, "Replications per grid point");
  experiment->add_option("--p-grid", o.p_grid, "Comma-separated p values")->delimiter(',');
  experiment->add_option("--l-grid", o.l_grid, "Comma-separated L values")->delimiter(',');
  experiment->add_option("--grid-points", o.grid_points, "Rate grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*simulate) return run_simulate(o);
    if (*fit_cmd) return run_fit(o);
    if (*ci) return run_ci(o);
    if (*topk) return run_test_topk(o);
    if (*screen) return run_screen(o);
    if (*experiment) return run_experiment(o, *experiment);
  } catch (const ri::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ri::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 3;
  }
  return 0;
}
