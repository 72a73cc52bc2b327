#include "vcount/rho_provider.hpp"

#include <algorithm>
#include <string>

#include "vcount/errors.hpp"

namespace vcount {

std::string_view to_string(DetectorLocation loc) {
  switch (loc) {
    case DetectorLocation::none: return "none";
    case DetectorLocation::entrance: return "entrance";
    case DetectorLocation::middle: return "middle";
    case DetectorLocation::exit: return "exit";
  }
  return "none";
}

DetectorLocation parse_detector_location(std::string_view name) {
  for (auto loc : {DetectorLocation::none, DetectorLocation::entrance, DetectorLocation::middle,
                   DetectorLocation::exit})
    if (name == to_string(loc)) return loc;
  throw ConfigError("unknown detector location '" + std::string(name) + "'");
}

DetectorSpec DetectorSpec::at(DetectorLocation loc, const ApproachGeometry& geom) {
  switch (loc) {
    case DetectorLocation::none:
    case DetectorLocation::entrance: return {loc, 0.0};
    case DetectorLocation::middle: return {loc, geom.length_m / 2.0};
    case DetectorLocation::exit: return {loc, geom.length_m};
  }
  return {};
}

DetectorCrossings::DetectorCrossings(std::span<const VehicleRecord> log, const DetectorSpec& spec,
                                     const ApproachGeometry& geom)
    : spec_(spec) {
  if (spec.position_m < 0.0 || spec.position_m > geom.length_m)
    throw ConfigError("detector position outside the approach");
  times_.resize(log.size());

  switch (spec.location) {
    case DetectorLocation::none: return;
    case DetectorLocation::entrance:
      for (std::size_t i = 0; i < log.size(); ++i) times_[i] = log[i].t_entry;
      return;
    case DetectorLocation::exit:
      for (std::size_t i = 0; i < log.size(); ++i) times_[i] = log[i].t_exit;
      return;
    case DetectorLocation::middle: break;
  }

  const double v = geom.free_flow_speed_mps();
  const double travel = geom.free_flow_time_s();
  const double downstream = geom.length_m - spec.position_m;

  // Stop-bar arrival and departure times, each sorted, to count the queue
  // (arrived at the bar, not yet departed) at any instant.
  std::vector<double> at_bar;
  std::vector<double> departed;
  for (const auto& r : log) {
    at_bar.push_back(r.t_entry + travel);
    if (r.t_exit) departed.push_back(*r.t_exit);
  }
  std::sort(at_bar.begin(), at_bar.end());
  std::sort(departed.begin(), departed.end());

  for (std::size_t i = 0; i < log.size(); ++i) {
    const double reach = log[i].t_entry + spec.position_m / v;
    if (!log[i].t_exit) {
      times_[i] = reach;
      continue;
    }
    const auto queued = (std::upper_bound(at_bar.begin(), at_bar.end(), reach) - at_bar.begin()) -
                        (std::upper_bound(departed.begin(), departed.end(), reach) -
                         departed.begin());
    const double tail = static_cast<double>(queued) * geom.jam_spacing_m();
    times_[i] = tail > downstream ? *log[i].t_exit - downstream / v : reach;
  }
}

double DetectorCrossings::rho_for_interval(std::span<const VehicleRecord> tagged_log,
                                           const Interval& interval, double rho_fixed) const {
  if (spec_.location == DetectorLocation::none) return rho_fixed;
  if (tagged_log.size() != times_.size())
    throw DataError("tagged log does not match the detector crossing table");
  std::int64_t probes = 0;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const auto& t = times_[i];
    if (!t || *t <= interval.t_begin || *t > interval.t_end) continue;
    ++total;
    if (tagged_log[i].is_probe) ++probes;
  }
  if (total == 0 || probes == 0) return rho_fixed;
  return static_cast<double>(probes) / static_cast<double>(total);
}

double rho_for_interval(std::span<const VehicleRecord> tagged_log, const Interval& interval,
                        const DetectorSpec& spec, const ApproachGeometry& geom, double rho_fixed) {
  if (spec.location == DetectorLocation::none) return rho_fixed;
  return DetectorCrossings(tagged_log, spec, geom).rho_for_interval(tagged_log, interval, rho_fixed);
}

}  // namespace vcount
