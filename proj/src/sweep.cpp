#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "vcount/errors.hpp"
#include "vcount/evaluation.hpp"

namespace vcount {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_number(std::string_view text, SweepAxis axis) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError("bad value '" + std::string(text) + "' for sweep axis " +
                      std::string(to_string(axis)));
  return v;
}

std::vector<std::string> labels(std::initializer_list<double> xs) {
  std::vector<std::string> out;
  for (double x : xs) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    out.emplace_back(buf, res.ptr);
  }
  return out;
}

const std::vector<std::string> kLmpLevels =
    labels({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::lmp: return "lmp";
    case SweepAxis::sample_size: return "sample_size";
    case SweepAxis::fixed_dt: return "fixed_dt";
    case SweepAxis::vc_ratio: return "vc_ratio";
    case SweepAxis::approach_length: return "approach_length";
    case SweepAxis::detector_location: return "detector_location";
  }
  return "lmp";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::lmp, SweepAxis::sample_size, SweepAxis::fixed_dt, SweepAxis::vc_ratio,
                 SweepAxis::approach_length, SweepAxis::detector_location})
    if (name == to_string(a)) return a;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

void apply_axis(ScenarioConfig& scenario, SweepAxis axis, std::string_view value) {
  switch (axis) {
    case SweepAxis::lmp:
      scenario.sampling.lmp = parse_number(value, axis);
      return;
    case SweepAxis::sample_size: {
      const double n = parse_number(value, axis);
      if (n != std::floor(n) || n < 1) throw ConfigError("sample_size must be a positive integer");
      scenario.schedule.mode = IntervalMode::variable;
      scenario.schedule.n_sample = static_cast<std::int64_t>(n);
      return;
    }
    case SweepAxis::fixed_dt:
      if (value == "variable") {
        scenario.schedule.mode = IntervalMode::variable;
      } else {
        scenario.schedule.mode = IntervalMode::fixed;
        scenario.schedule.fixed_dt = parse_number(value, axis);
      }
      return;
    case SweepAxis::vc_ratio:
      scenario.vc_ratio = parse_number(value, axis);
      return;
    case SweepAxis::approach_length:
      scenario.geometry.length_m = parse_number(value, axis);
      return;
    case SweepAxis::detector_location:
      scenario.detector = parse_detector_location(value);
      return;
  }
}

void SweepSpec::validate() const {
  if (axes.empty()) throw ConfigError("sweep needs at least one axis");
  base.validate();
  for (const auto& a : axes) {
    if (a.values.empty())
      throw ConfigError("sweep axis " + std::string(to_string(a.axis)) + " has no values");
    for (const auto& v : a.values) {
      ScenarioConfig probe = base;
      apply_axis(probe, a.axis, v);
      probe.validate();
    }
  }
}

SweepSpec sweep_preset(std::string_view name, const ScenarioConfig& base) {
  SweepSpec s;
  s.base = base;
  const auto lmp3 = labels({0.2, 0.5, 0.8});
  if (name == "table2") {
    s.axes = {{SweepAxis::sample_size, labels({1, 2, 3, 4, 5, 6, 7, 8, 9, 10})},
              {SweepAxis::lmp, labels({0.1, 0.5, 0.8})}};
  } else if (name == "table3") {
    auto dts = labels({15, 20, 30, 40, 50, 60, 120, 240});
    dts.emplace_back("variable");
    s.axes = {{SweepAxis::fixed_dt, dts}, {SweepAxis::lmp, lmp3}};
  } else if (name == "table4" || name == "table5") {
    s.axes = {{SweepAxis::lmp, kLmpLevels}};
  } else if (name == "fig4") {
    s.axes = {{SweepAxis::lmp, kLmpLevels},
              {SweepAxis::sample_size, labels({1, 2, 3, 4, 5, 6, 7, 8, 9, 10})}};
  } else if (name == "table6") {
    s.axes = {{SweepAxis::lmp, kLmpLevels},
              {SweepAxis::detector_location, {"none", "entrance", "middle", "exit"}}};
  } else if (name == "table7") {
    s.axes = {{SweepAxis::approach_length, labels({74, 150, 200, 300, 400})},
              {SweepAxis::lmp, lmp3}};
  } else if (name == "table8") {
    s.axes = {{SweepAxis::lmp, kLmpLevels},
              {SweepAxis::vc_ratio, labels({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1})}};
  } else if (name == "table9") {
    s.base.geometry.length_m = 400.0;
    s.base.schedule.n_sample = 8;
    s.base.vc_ratio = 1.1;
    s.axes = {{SweepAxis::lmp, kLmpLevels}};
  } else if (name == "table10") {
    s.base.geometry.length_m = 400.0;
    s.base.schedule.n_sample = 8;
    s.axes = {{SweepAxis::vc_ratio, labels({0.2, 0.5, 1.1})},
              {SweepAxis::lmp, kLmpLevels},
              {SweepAxis::detector_location, {"none", "entrance", "middle", "exit"}}};
  } else {
    throw ConfigError("unknown sweep preset '" + std::string(name) + "'");
  }
  return s;
}

SweepAggregate aggregate(std::span<const SweepRow> rows) {
  SweepAggregate a;
  if (!rows.empty()) a.coords = rows.front().coords;
  a.runs = static_cast<std::int64_t>(rows.size());

  std::vector<double> rrmse, rmse, dts;
  double sum_sq = 0.0, sum_true = 0.0, steps = 0.0;
  a.max_dt_s = kNaN;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++a.failed_runs;
      continue;
    }
    if (r.mean_dt_s) {
      dts.push_back(*r.mean_dt_s);
      a.max_dt_s = std::isnan(a.max_dt_s) ? *r.max_dt_s : std::max(a.max_dt_s, *r.max_dt_s);
    }
    if (!r.rmse_veh) {
      ++a.undefined_runs;
      continue;
    }
    ++a.defined_runs;
    rmse.push_back(*r.rmse_veh);
    if (r.rrmse_pct) rrmse.push_back(*r.rrmse_pct);
    sum_sq += r.sum_sq_error;
    sum_true += r.sum_true;
    steps += static_cast<double>(r.n_steps);
  }

  auto mean_sd = [](const std::vector<double>& v, double& mean, double& sd) {
    if (v.empty()) {
      mean = sd = kNaN;
      return;
    }
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    mean = m;
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  };
  mean_sd(rrmse, a.mean_rrmse_pct, a.sd_rrmse_pct);
  mean_sd(rmse, a.mean_rmse_veh, a.sd_rmse_veh);
  double unused = 0.0;
  mean_sd(dts, a.mean_dt_s, unused);
  a.pooled_rmse_veh = steps > 0 ? std::sqrt(sum_sq / steps) : kNaN;
  a.pooled_rrmse_pct = sum_true > 0 ? 100.0 * std::sqrt(steps * sum_sq) / sum_true : kNaN;
  return a;
}

SweepTable sweep(const SweepSpec& spec, Execution policy) {
  spec.validate();

  SweepTable table;
  for (const auto& a : spec.axes) table.axes.push_back(a.axis);

  // Grid cells, first axis slowest.
  std::vector<std::vector<std::string>> coords{{}};
  for (const auto& a : spec.axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& c : coords)
      for (const auto& v : a.values) {
        auto d = c;
        d.push_back(v);
        next.push_back(std::move(d));
      }
    coords = std::move(next);
  }

  std::vector<ScenarioConfig> scenarios;
  for (const auto& c : coords) {
    ScenarioConfig s = spec.base;
    for (std::size_t i = 0; i < c.size(); ++i) apply_axis(s, spec.axes[i].axis, c[i]);
    scenarios.push_back(std::move(s));
  }

  const auto n_cells = static_cast<std::int64_t>(scenarios.size());
  std::vector<std::optional<ScenarioData>> data(scenarios.size());
  std::vector<std::string> prep_error(scenarios.size());
  auto prepare_cell = [&](std::int64_t c) {
    const auto i = static_cast<std::size_t>(c);
    try {
      data[i].emplace(prepare(scenarios[i]));
    } catch (const std::exception& e) {
      prep_error[i] = e.what();
    }
  };
  if (policy == Execution::serial) {
    for (std::int64_t c = 0; c < n_cells; ++c) prepare_cell(c);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n_cells; ++c) prepare_cell(c);
  }

  struct Job {
    std::size_t cell;
    std::int64_t replication;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < scenarios.size(); ++c)
    for (std::int64_t r = 0; r < scenarios[c].sampling.replications; ++r) jobs.push_back({c, r});

  table.rows.resize(jobs.size());
  auto run_job = [&](std::int64_t j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    SweepRow& row = table.rows[static_cast<std::size_t>(j)];
    row.cell = job.cell;
    row.coords = coords[job.cell];
    row.replication = job.replication;
    if (!prep_error[job.cell].empty()) {
      row.error = prep_error[job.cell];
      return;
    }
    try {
      const RunResult r = run_replication(*data[job.cell], scenarios[job.cell], job.replication);
      row.rrmse_pct = r.rrmse_pct;
      row.rmse_veh = r.rmse_veh;
      row.n_steps = r.n_steps;
      row.undefined_steps = r.undefined_steps;
      row.sum_sq_error = r.sum_sq_error;
      row.sum_true = r.sum_true;
      if (r.n_steps > 0) {
        row.mean_dt_s = r.mean_dt_s;
        row.max_dt_s = r.max_dt_s;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  const auto n_jobs = static_cast<std::int64_t>(jobs.size());
  if (policy == Execution::serial) {
    for (std::int64_t j = 0; j < n_jobs; ++j) run_job(j);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t j = 0; j < n_jobs; ++j) run_job(j);
  }

  std::size_t begin = 0;
  for (std::size_t c = 0; c < scenarios.size(); ++c) {
    std::size_t end = begin;
    while (end < table.rows.size() && table.rows[end].cell == c) ++end;
    auto agg = aggregate(std::span<const SweepRow>(table.rows).subspan(begin, end - begin));
    agg.coords = coords[c];
    table.aggregates.push_back(std::move(agg));
    begin = end;
  }
  return table;
}

}  // namespace vcount
