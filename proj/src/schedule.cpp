#include "vcount/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "vcount/errors.hpp"

namespace vcount {

void validate_log(std::span<const VehicleRecord> log) {
  std::unordered_set<std::int64_t> seen;
  seen.reserve(log.size());
  for (const auto& v : log) {
    if (!seen.insert(v.vehicle_id).second)
      throw DataError("duplicate vehicle_id " + std::to_string(v.vehicle_id));
    if (!std::isfinite(v.t_entry))
      throw DataError("non-finite entry time for vehicle " + std::to_string(v.vehicle_id));
    if (v.t_exit && !(*v.t_exit > v.t_entry))
      throw DataError("exit does not follow entry for vehicle " + std::to_string(v.vehicle_id));
  }
}

void ScheduleConfig::validate() const {
  if (!(t_end > t_start)) throw ConfigError("observation window must be non-empty");
  if (mode == IntervalMode::variable && n_sample < 1)
    throw ConfigError("n_sample must be >= 1 in variable mode");
  if (mode == IntervalMode::fixed && !(fixed_dt > 0.0))
    throw ConfigError("fixed_dt must be > 0 in fixed mode");
}

namespace {

struct ProbeExit {
  double t_exit;
  double travel_time;
};

// Probe counts, mean travel time and boundaries filled from sorted event lists.
class ProbeEvents {
 public:
  ProbeEvents(std::span<const VehicleRecord> log, const ScheduleConfig& cfg) {
    for (const auto& v : log) {
      if (!v.is_probe) continue;
      entries_.push_back(v.t_entry);
      if (v.t_exit && *v.t_exit > cfg.t_start && *v.t_exit <= cfg.t_end)
        exits_.push_back({*v.t_exit, *v.t_exit - v.t_entry});
    }
    std::sort(entries_.begin(), entries_.end());
    std::sort(exits_.begin(), exits_.end(),
              [](const ProbeExit& a, const ProbeExit& b) { return a.t_exit < b.t_exit; });
  }

  [[nodiscard]] const std::vector<ProbeExit>& exits() const { return exits_; }

  [[nodiscard]] std::int64_t entries_in(double lo, double hi) const {
    const auto a = std::upper_bound(entries_.begin(), entries_.end(), lo);
    const auto b = std::upper_bound(entries_.begin(), entries_.end(), hi);
    return b - a;
  }

  // Exits in (lo, hi] as a [first, last) index range.
  [[nodiscard]] std::pair<std::size_t, std::size_t> exits_in(double lo, double hi) const {
    auto key_r = [](double t, const ProbeExit& e) { return t < e.t_exit; };
    const auto a = std::upper_bound(exits_.begin(), exits_.end(), lo, key_r);
    const auto b = std::upper_bound(exits_.begin(), exits_.end(), hi, key_r);
    return {static_cast<std::size_t>(a - exits_.begin()),
            static_cast<std::size_t>(b - exits_.begin())};
  }

  [[nodiscard]] IntervalObservation observe(double lo, double hi) const {
    IntervalObservation o;
    o.t_end = hi;
    o.dt = hi - lo;
    o.a_p = entries_in(lo, hi);
    const auto [first, last] = exits_in(lo, hi);
    o.d_p = static_cast<std::int64_t>(last - first);
    if (last > first) {
      double sum = 0.0;
      for (std::size_t i = first; i < last; ++i) sum += exits_[i].travel_time;
      o.tt_mean = sum / static_cast<double>(last - first);
    }
    return o;
  }

 private:
  std::vector<double> entries_;
  std::vector<ProbeExit> exits_;
};

}  // namespace

std::vector<IntervalObservation> schedule(std::span<const VehicleRecord> log,
                                          const ScheduleConfig& cfg) {
  cfg.validate();
  if (log.empty()) return {};
  validate_log(log);

  const ProbeEvents events(log, cfg);
  std::vector<IntervalObservation> out;

  if (cfg.mode == IntervalMode::fixed) {
    double lo = cfg.t_start;
    for (std::int64_t k = 1; lo < cfg.t_end; ++k) {
      const double hi = std::min(cfg.t_start + static_cast<double>(k) * cfg.fixed_dt, cfg.t_end);
      out.push_back(events.observe(lo, hi));
      lo = hi;
    }
    return out;
  }

  const auto& exits = events.exits();
  if (exits.empty()) throw NoProbesError("no probe crosses the stop bar inside the window");

  const auto n = static_cast<std::size_t>(cfg.n_sample);
  double lo = cfg.t_start;
  std::size_t i = 0;
  while (i + n <= exits.size()) {
    std::size_t last = i + n - 1;
    // Probes tied with the n-th one close the same interval.
    while (last + 1 < exits.size() && exits[last + 1].t_exit == exits[last].t_exit) ++last;
    const double hi = exits[last].t_exit;
    out.push_back(events.observe(lo, hi));
    lo = hi;
    i = last + 1;
  }
  return out;
}

std::vector<Interval> intervals_of(std::span<const IntervalObservation> obs, double t_start) {
  std::vector<Interval> out;
  out.reserve(obs.size());
  double lo = t_start;
  for (const auto& o : obs) {
    out.push_back({lo, o.t_end});
    lo = o.t_end;
  }
  return out;
}

OccupancyIndex::OccupancyIndex(std::span<const VehicleRecord> log) {
  entries_.reserve(log.size());
  for (const auto& v : log) {
    entries_.push_back(v.t_entry);
    if (v.t_exit) exits_.push_back(*v.t_exit);
  }
  std::sort(entries_.begin(), entries_.end());
  std::sort(exits_.begin(), exits_.end());
}

std::int64_t OccupancyIndex::count_at(double t) const {
  // Exit implies entry, so on-approach = entered by t minus exited by t.
  const auto entered = std::upper_bound(entries_.begin(), entries_.end(), t) - entries_.begin();
  const auto exited = std::upper_bound(exits_.begin(), exits_.end(), t) - exits_.begin();
  return entered - exited;
}

std::vector<std::int64_t> ground_truth_counts(std::span<const VehicleRecord> log,
                                              std::span<const double> boundaries) {
  const OccupancyIndex index(log);
  std::vector<std::int64_t> out;
  out.reserve(boundaries.size());
  for (double t : boundaries) out.push_back(index.count_at(t));
  return out;
}

}  // namespace vcount
