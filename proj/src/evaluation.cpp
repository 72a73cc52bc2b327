#include "vcount/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vcount/errors.hpp"

namespace vcount {

void ScenarioConfig::validate() const {
  geometry.validate();
  signal.validate();
  demand.validate();
  sampling.validate();
  resolved_schedule().validate();
  resolved_filter().validate();
  if (vc_ratio && !(*vc_ratio >= 0.0 && std::isfinite(*vc_ratio)))
    throw ConfigError("vc_ratio must be >= 0");
  if (vc_ratio && *vc_ratio > 3.0)
    throw ConfigError("vc_ratio above 3 is outside the simulable range");
}

DemandProfile ScenarioConfig::resolved_demand() const {
  DemandProfile d = demand;
  if (vc_ratio) d.arrival_rate_vph = *vc_ratio * capacity(geometry, signal, demand);
  return d;
}

FilterConfig ScenarioConfig::resolved_filter() const {
  FilterConfig f = filter;
  f.rho_fixed = rho_fixed.value_or(sampling.lmp);
  return f;
}

ScheduleConfig ScenarioConfig::resolved_schedule() const {
  ScheduleConfig s = schedule;
  s.t_end = std::min(s.t_end, demand.duration_s);
  return s;
}

ScenarioConfig default_scenario() {
  ScenarioConfig s;
  s.schedule.t_start = 0.0;
  s.schedule.t_end = s.demand.duration_s;
  return s;
}

Score score(std::span<const StepRecord> records) {
  Score s;
  s.steps = static_cast<std::int64_t>(records.size());
  for (const auto& r : records) {
    if (!r.n_true) throw DataError("step record " + std::to_string(r.step) + " has no n_true");
    if (!r.defined()) {
      ++s.undefined_steps;
      continue;
    }
    const double e = r.n_post - *r.n_true;
    s.sum_sq_error += e * e;
    s.sum_true += *r.n_true;
  }
  if (s.steps == 0 || s.undefined_steps > 0) return s;
  const auto S = static_cast<double>(s.steps);
  s.rmse_veh = std::sqrt(s.sum_sq_error / S);
  if (s.sum_true > 0.0) s.rrmse_pct = 100.0 * std::sqrt(S * s.sum_sq_error) / s.sum_true;
  return s;
}

ScenarioData::ScenarioData(EventLog log_in, const ScenarioConfig& scenario)
    : log(std::move(log_in)), occupancy(log) {
  if (scenario.detector != DetectorLocation::none)
    detector.emplace(log, DetectorSpec::at(scenario.detector, scenario.geometry),
                     scenario.geometry);
}

ScenarioData prepare(const ScenarioConfig& scenario) {
  scenario.validate();
  return ScenarioData(simulate(scenario.geometry, scenario.signal, scenario.resolved_demand()),
                      scenario);
}

RunResult run_on_log(const ScenarioData& data, const ScenarioConfig& scenario,
                     std::span<const VehicleRecord> tagged) {
  const ScheduleConfig sched = scenario.resolved_schedule();
  const FilterConfig fcfg = scenario.resolved_filter();

  auto observations = schedule(tagged, sched);
  const auto intervals = intervals_of(observations, sched.t_start);
  for (std::size_t k = 0; k < observations.size(); ++k) {
    auto& o = observations[k];
    o.n_true = static_cast<double>(data.occupancy.count_at(o.t_end));
    if (data.detector) o.rho_interval = data.detector->rho_for_interval(tagged, intervals[k], fcfg.rho_fixed);
  }

  RunResult result;
  CountFilter filter(fcfg);
  result.step_records.reserve(observations.size());
  for (const auto& o : observations) result.step_records.push_back(filter.step(o));

  const Score s = score(result.step_records);
  result.rrmse_pct = s.rrmse_pct;
  result.rmse_veh = s.rmse_veh;
  result.n_steps = s.steps;
  result.undefined_steps = s.undefined_steps;
  result.sum_sq_error = s.sum_sq_error;
  result.sum_true = s.sum_true;
  if (!observations.empty()) {
    double sum = 0.0;
    for (const auto& o : observations) {
      sum += o.dt;
      result.max_dt_s = std::max(result.max_dt_s, o.dt);
    }
    result.mean_dt_s = sum / static_cast<double>(observations.size());
  }
  return result;
}

RunResult run_replication(const ScenarioData& data, const ScenarioConfig& scenario,
                          std::int64_t replication) {
  const auto tagged = tag(data.log, scenario.sampling.lmp, scenario.sampling.seed_for(replication),
                          scenario.sampling.method);
  return run_on_log(data, scenario, tagged);
}

RunResult run_scenario(const ScenarioConfig& scenario) {
  const ScenarioData data = prepare(scenario);
  return run_replication(data, scenario, 0);
}

namespace {

ReplicationOutcome guarded_replication(const ScenarioData& data, const ScenarioConfig& scenario,
                                       std::int64_t r) {
  ReplicationOutcome out;
  try {
    out.result = run_replication(data, scenario, r);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<ReplicationOutcome> run_replications(const ScenarioData& data,
                                                 const ScenarioConfig& scenario,
                                                 Execution policy) {
  const std::int64_t n = scenario.sampling.replications;
  std::vector<ReplicationOutcome> out(static_cast<std::size_t>(n));
  if (policy == Execution::serial) {
    for (std::int64_t r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = guarded_replication(data, scenario, r);
    return out;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < n; ++r)
    out[static_cast<std::size_t>(r)] = guarded_replication(data, scenario, r);
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace vcount
