#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcount/approach_sim.hpp"
#include "vcount/kalman.hpp"
#include "vcount/probe_sampler.hpp"
#include "vcount/rho_provider.hpp"
#include "vcount/schedule.hpp"

namespace vcount {

/// Everything needed to reproduce one experiment cell.
struct ScenarioConfig {
  ApproachGeometry geometry;
  SignalTiming signal;
  DemandProfile demand;
  std::optional<double> vc_ratio;   // when set, demand = vc_ratio * capacity
  SamplingPlan sampling;
  ScheduleConfig schedule;
  FilterConfig filter;
  std::optional<double> rho_fixed;  // when unset, the target LMP is used
  DetectorLocation detector = DetectorLocation::none;

  void validate() const;
  [[nodiscard]] DemandProfile resolved_demand() const;
  [[nodiscard]] FilterConfig resolved_filter() const;
  [[nodiscard]] ScheduleConfig resolved_schedule() const;
};

/// Default layout: 74 m single-lane approach, 40 km/h, 120 s cycle with a
/// 50:50 split and 3 s lost time, 1800 veh/h/lane, 650 veh/h for 75 min.
[[nodiscard]] ScenarioConfig default_scenario();

struct Score {
  std::optional<double> rrmse_pct;
  std::optional<double> rmse_veh;
  std::int64_t steps = 0;
  std::int64_t undefined_steps = 0;
  double sum_sq_error = 0.0;  // over defined steps
  double sum_true = 0.0;
};

/// RRMSE = 100 sqrt(S sum e^2) / sum N, RMSE = sqrt(sum e^2 / S).
/// Any undefined step makes both metrics undefined. A zero truth sum leaves
/// only RRMSE undefined. Throws DataError when a record lacks n_true.
[[nodiscard]] Score score(std::span<const StepRecord> records);

struct RunResult {
  std::vector<StepRecord> step_records;
  std::optional<double> rrmse_pct;
  std::optional<double> rmse_veh;
  std::int64_t n_steps = 0;
  std::int64_t undefined_steps = 0;
  double sum_sq_error = 0.0;
  double sum_true = 0.0;
  double mean_dt_s = 0.0;
  double max_dt_s = 0.0;

  [[nodiscard]] bool defined() const { return rrmse_pct.has_value(); }
};

/// Ground-truth log plus the per-scenario indexes replications share.
struct ScenarioData {
  EventLog log;
  OccupancyIndex occupancy;
  std::optional<DetectorCrossings> detector;

  ScenarioData(EventLog log, const ScenarioConfig& scenario);
};

/// Simulates the scenario's ground truth.
[[nodiscard]] ScenarioData prepare(const ScenarioConfig& scenario);

/// Tags, schedules, filters and scores one Monte Carlo replication of an
/// existing log. `tagged` overrides the tagging step when provided.
[[nodiscard]] RunResult run_on_log(const ScenarioData& data, const ScenarioConfig& scenario,
                                   std::span<const VehicleRecord> tagged);
[[nodiscard]] RunResult run_replication(const ScenarioData& data, const ScenarioConfig& scenario,
                                        std::int64_t replication);

/// Full pipeline for replication 0: simulate, tag, schedule, filter, score.
[[nodiscard]] RunResult run_scenario(const ScenarioConfig& scenario);

enum class Execution { serial, parallel };

/// Outcome of one replication; `error` is set when the pipeline threw.
struct ReplicationOutcome {
  std::optional<RunResult> result;
  std::string error;
};

/// All sampling.replications runs over one shared ground-truth log.
/// Results are in replication order and identical for both policies.
[[nodiscard]] std::vector<ReplicationOutcome> run_replications(const ScenarioData& data,
                                                               const ScenarioConfig& scenario,
                                                               Execution policy);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { lmp, sample_size, fixed_dt, vc_ratio, approach_length, detector_location };

[[nodiscard]] std::string_view to_string(SweepAxis axis);
[[nodiscard]] SweepAxis parse_sweep_axis(std::string_view name);

/// Sets one axis value on a scenario. fixed_dt also accepts "variable".
void apply_axis(ScenarioConfig& scenario, SweepAxis axis, std::string_view value);

struct AxisValues {
  SweepAxis axis = SweepAxis::lmp;
  std::vector<std::string> values;
};

/// Cartesian grid over one or more axes; the first axis varies slowest.
struct SweepSpec {
  std::vector<AxisValues> axes;
  ScenarioConfig base;

  void validate() const;
};

/// Named grids: table2 .. table10 and fig4.
[[nodiscard]] SweepSpec sweep_preset(std::string_view name, const ScenarioConfig& base);

struct SweepRow {
  std::size_t cell = 0;
  std::vector<std::string> coords;
  std::int64_t replication = 0;
  std::optional<double> rrmse_pct;
  std::optional<double> rmse_veh;
  std::int64_t n_steps = 0;
  std::int64_t undefined_steps = 0;
  std::optional<double> mean_dt_s;
  std::optional<double> max_dt_s;
  double sum_sq_error = 0.0;
  double sum_true = 0.0;
  std::string error;
};

/// Per-cell statistics. Means skip undefined and failed runs; NaN when none remain.
struct SweepAggregate {
  std::vector<std::string> coords;
  std::int64_t runs = 0;
  std::int64_t defined_runs = 0;
  std::int64_t undefined_runs = 0;
  std::int64_t failed_runs = 0;
  double mean_rrmse_pct = 0.0;
  double sd_rrmse_pct = 0.0;
  double pooled_rrmse_pct = 0.0;
  double mean_rmse_veh = 0.0;
  double sd_rmse_veh = 0.0;
  double pooled_rmse_veh = 0.0;
  double mean_dt_s = 0.0;
  double max_dt_s = 0.0;
};

struct SweepTable {
  std::vector<SweepAxis> axes;
  std::vector<SweepRow> rows;              // cell-major, replication-minor
  std::vector<SweepAggregate> aggregates;  // one per cell, grid order
};

[[nodiscard]] SweepTable sweep(const SweepSpec& spec, Execution policy);

/// Summary statistics for a list of per-run values, ignoring NaNs.
[[nodiscard]] SweepAggregate aggregate(std::span<const SweepRow> rows);

/// Spearman rank correlation with average ranks for ties.
[[nodiscard]] double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace vcount
