#include "vcount/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "vcount/config.hpp"
#include "vcount/csv.hpp"
#include "vcount/errors.hpp"
#include "vcount/evaluation.hpp"
#include "vcount/rng.hpp"

namespace vcount::cli {

namespace {

constexpr std::string_view kToolVersion = "vcount 1.0.0";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

EventLog load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  try {
    return csv::read_event_log(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

config::KeyValues load_config(const std::string& path) {
  if (path.empty()) return {};
  return config::KeyValues::load(path);
}

std::string fmt(const std::optional<double>& v) {
  if (!v) return "undefined";
  std::ostringstream o;
  o.precision(6);
  o << *v;
  return o.str();
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ScenarioConfig s = config::scenario_from(load_config(a.config));
  if (a.seed) s.demand.seed = *a.seed;
  s.validate();
  const auto truth = simulate(s.geometry, s.signal, s.resolved_demand());
  const auto log = tag(truth, s.sampling.lmp, s.sampling.seed_for(0), s.sampling.method);
  auto file = open_out(a.out);
  csv::write_event_log(file, log);
  if (!file) throw DataError("write failed: " + a.out);

  const auto probes = std::count_if(log.begin(), log.end(), [](auto& v) { return v.is_probe; });
  out << "vehicles: " << log.size() << "\nprobes: " << probes
      << "\nduration_s: " << s.demand.duration_s
      << "\narrival_rate_vph: " << s.resolved_demand().arrival_rate_vph << "\nwrote: " << a.out
      << '\n';
  return 0;
}

// --- tag --------------------------------------------------------------------

struct TagArgs {
  std::string in;
  std::string out;
  double lmp = 0.2;
  std::uint64_t seed = 1;
  std::string method = "bernoulli";
};

int cmd_tag(const TagArgs& a, std::ostream& out) {
  const auto log = load_log(a.in);
  const auto method = a.method == "exact_count" ? SamplingMethod::exact_count
                                                : SamplingMethod::bernoulli;
  const auto tagged = tag(log, a.lmp, a.seed, method);
  auto file = open_out(a.out);
  csv::write_event_log(file, tagged);
  const auto probes =
      std::count_if(tagged.begin(), tagged.end(), [](auto& v) { return v.is_probe; });
  out << "vehicles: " << tagged.size() << "\nprobes: " << probes << '\n';
  return 0;
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string log;
  std::string config;
  std::string out;
  std::optional<std::string> mode;
  std::optional<std::int64_t> n_sample;
  std::optional<double> fixed_dt;
  std::optional<double> lmp;
  std::optional<double> rho_min;
  std::optional<double> rho_fixed;
  std::optional<double> r_meas;
  std::optional<std::string> detector;
  std::optional<std::string> missing_policy;
  std::optional<std::uint64_t> seed;
  bool no_clamp = false;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const auto kv = load_config(a.config);
  ScenarioConfig s = config::scenario_from(kv);
  EventLog log = load_log(a.log);

  if (a.mode) {
    if (*a.mode == "variable") s.schedule.mode = IntervalMode::variable;
    else if (*a.mode == "fixed") s.schedule.mode = IntervalMode::fixed;
    else throw ConfigError("--mode must be variable or fixed");
  }
  if (a.n_sample) s.schedule.n_sample = *a.n_sample;
  if (a.fixed_dt) s.schedule.fixed_dt = *a.fixed_dt;
  if (a.rho_min) s.filter.rho_min = *a.rho_min;
  if (a.r_meas) s.filter.r_meas = *a.r_meas;
  if (a.no_clamp) s.filter.clamp_nonnegative = false;
  if (a.detector) s.detector = parse_detector_location(*a.detector);
  if (a.missing_policy) {
    if (*a.missing_policy == "paper_nan") s.filter.missing_policy = MissingPolicy::paper_nan;
    else if (*a.missing_policy == "predict_only") s.filter.missing_policy = MissingPolicy::predict_only;
    else throw ConfigError("--missing-policy must be paper_nan or predict_only");
  }
  if (a.seed) s.sampling.base_seed = *a.seed;
  if (a.lmp) {
    s.sampling.lmp = *a.lmp;
    s.sampling.validate();
    log = tag(log, *a.lmp, s.sampling.seed_for(0), s.sampling.method);
  }

  if (a.rho_fixed) {
    s.rho_fixed = *a.rho_fixed;
  } else if (!s.rho_fixed && !a.lmp) {
    // Historical estimate: the log's overall probe share.
    const auto probes = std::count_if(log.begin(), log.end(), [](auto& v) { return v.is_probe; });
    if (probes == 0) throw NoProbesError("event log contains no probe vehicles");
    s.rho_fixed = static_cast<double>(probes) / static_cast<double>(log.size());
  }

  if (!kv.contains("t_end")) {
    double last = s.schedule.t_start;
    for (const auto& v : log) last = std::max({last, v.t_entry, v.t_exit.value_or(last)});
    s.schedule.t_end = last > s.schedule.t_start ? last : s.schedule.t_start + 1.0;
    s.demand.duration_s = std::max(s.demand.duration_s, s.schedule.t_end);
  }
  s.validate();

  const ScenarioData data(log, s);
  const RunResult r = run_on_log(data, s, data.log);

  if (!a.out.empty()) {
    auto file = open_out(a.out);
    csv::write_step_records(file, r.step_records);
  }
  out << "steps: " << r.n_steps << "\nundefined_steps: " << r.undefined_steps
      << "\nrrmse_pct: " << fmt(r.rrmse_pct) << "\nrmse_veh: " << fmt(r.rmse_veh)
      << "\nmean_dt_s: " << r.mean_dt_s << '\n';
  return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string spec;
  std::optional<std::string> preset;
  std::string out;
  std::string aggregates;
  std::string plot;
  std::optional<std::int64_t> replications;
  std::optional<int> threads;
  bool serial = false;
};

std::string default_aggregate_path(const std::string& out) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out + "_aggregate";
  return out.substr(0, dot) + "_aggregate" + out.substr(dot);
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  auto kv = load_config(a.spec);
  if (a.preset) kv.set("preset", *a.preset);
  if (a.replications) kv.set("replications", std::to_string(*a.replications));
  if (!kv.contains("preset") &&
      std::none_of(kv.entries().begin(), kv.entries().end(),
                   [](auto& e) { return e.key.starts_with("sweep."); }))
    throw ConfigError("sweep spec needs 'preset = ...' or at least one 'sweep.<axis> = ...'");
  const SweepSpec spec = config::sweep_from(kv);
  if (a.threads) omp_set_num_threads(std::max(1, *a.threads));

  const SweepTable table = sweep(spec, a.serial ? Execution::serial : Execution::parallel);

  std::string canon = config::to_text(spec.base);
  for (const auto& ax : spec.axes) {
    canon += "sweep." + std::string(to_string(ax.axis)) + " =";
    for (const auto& v : ax.values) canon += " " + v;
    canon += '\n';
  }
  const csv::Metadata meta = {
      {"tool", std::string(kToolVersion)},
      {"generator", std::string(Rng::kVersion)},
      {"sim_seed", std::to_string(spec.base.demand.seed)},
      {"base_seed", std::to_string(spec.base.sampling.base_seed)},
      {"replications", std::to_string(spec.base.sampling.replications)},
      {"config_hash", "fnv1a64:" + config::fnv1a_hex(canon)},
  };

  {
    auto file = open_out(a.out);
    csv::write_sweep_rows(file, table, meta);
  }
  const std::string agg_path = a.aggregates.empty() ? default_aggregate_path(a.out) : a.aggregates;
  {
    auto file = open_out(agg_path);
    csv::write_sweep_aggregates(file, table, meta);
  }
  if (!a.plot.empty()) {
    auto file = open_out(a.plot);
    csv::write_plot_data(file, table);
  }

  std::int64_t failed = 0;
  for (const auto& row : table.rows) failed += row.error.empty() ? 0 : 1;
  out << "cells: " << table.aggregates.size() << "\nruns: " << table.rows.size()
      << "\nfailed_runs: " << failed << "\nwrote: " << a.out << ", " << agg_path << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probe-vehicle count estimation on signalized approaches", "vcount"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic event log");
  simulate_cmd->add_option("-c,--config", sim.config, "Scenario config file");
  simulate_cmd->add_option("-o,--out", sim.out, "Event-log CSV to write")->required();
  simulate_cmd->add_option("--seed", sim.seed, "Override sim_seed");

  TagArgs tg;
  auto* tag_cmd = app.add_subcommand("tag", "Redraw probe flags on an event log");
  tag_cmd->add_option("-i,--in", tg.in, "Input event log")->required();
  tag_cmd->add_option("-o,--out", tg.out, "Output event log")->required();
  tag_cmd->add_option("--lmp", tg.lmp, "Target market penetration")->required();
  tag_cmd->add_option("--seed", tg.seed, "Sampling seed");
  tag_cmd->add_option("--method", tg.method, "bernoulli or exact_count")
      ->check(CLI::IsMember({"bernoulli", "exact_count"}));

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Run the count filter on an event log");
  estimate_cmd->add_option("-l,--log", est.log, "Event-log CSV")->required();
  estimate_cmd->add_option("-c,--config", est.config, "Scenario config file");
  estimate_cmd->add_option("-o,--out", est.out, "Step-records CSV to write");
  estimate_cmd->add_option("--mode", est.mode, "variable or fixed");
  estimate_cmd->add_option("--n-sample", est.n_sample, "Probe exits per interval");
  estimate_cmd->add_option("--fixed-dt", est.fixed_dt, "Fixed interval length (s)");
  estimate_cmd->add_option("--lmp", est.lmp, "Re-tag the log at this penetration");
  estimate_cmd->add_option("--rho-min", est.rho_min, "Floor on rho in the state equation");
  estimate_cmd->add_option("--rho-fixed", est.rho_fixed, "Historical penetration rate");
  estimate_cmd->add_option("--r-meas", est.r_meas, "Measurement covariance R");
  estimate_cmd->add_option("--detector", est.detector, "none, entrance, middle or exit");
  estimate_cmd->add_option("--missing-policy", est.missing_policy, "paper_nan or predict_only");
  estimate_cmd->add_option("--seed", est.seed, "Sampling seed used with --lmp");
  estimate_cmd->add_flag("--no-clamp", est.no_clamp, "Allow negative count estimates");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a Monte Carlo sensitivity sweep");
  sweep_cmd->add_option("-s,--spec", sw.spec, "Sweep spec file");
  sweep_cmd->add_option("--preset", sw.preset, "table2 .. table10 or fig4");
  sweep_cmd->add_option("-o,--out", sw.out, "Long-form results CSV")->required();
  sweep_cmd->add_option("--aggregates", sw.aggregates, "Per-cell aggregate CSV");
  sweep_cmd->add_option("--emit-plot-data", sw.plot, "Plot series CSV");
  sweep_cmd->add_option("--replications", sw.replications, "Override replications");
  sweep_cmd->add_option("--threads", sw.threads, "OpenMP thread count");
  sweep_cmd->add_flag("--serial", sw.serial, "Use the serial reference path");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::config_error);
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim, out);
    if (*tag_cmd) return cmd_tag(tg, out);
    if (*estimate_cmd) return cmd_estimate(est, out);
    if (*sweep_cmd) return cmd_sweep(sw, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::data_error);
  }
  return 0;
}

}  // namespace vcount::cli
