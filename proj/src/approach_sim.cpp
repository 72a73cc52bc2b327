#include "vcount/approach_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vcount/errors.hpp"
#include "vcount/rng.hpp"

namespace vcount {

void ApproachGeometry::validate() const {
  if (!(length_m > 0.0)) throw ConfigError("length_m must be > 0");
  if (lanes < 1) throw ConfigError("lanes must be >= 1");
  if (!(free_flow_speed_kmh > 0.0)) throw ConfigError("free_flow_speed_kmh must be > 0");
  if (!(jam_density_veh_per_km_per_lane > 0.0)) throw ConfigError("jam density must be > 0");
  if (capacity_vehicles() < 1)
    throw ConfigError("approach stores fewer than one vehicle at jam density");
}

std::int64_t ApproachGeometry::capacity_vehicles() const {
  return static_cast<std::int64_t>(
      std::floor(length_m / 1000.0 * jam_density_veh_per_km_per_lane * static_cast<double>(lanes)));
}

double ApproachGeometry::jam_spacing_m() const {
  return 1000.0 / (jam_density_veh_per_km_per_lane * static_cast<double>(lanes));
}

void SignalTiming::validate() const {
  if (!(cycle_s > 0.0)) throw ConfigError("cycle_s must be > 0");
  if (!(green_s > 0.0 && green_s < cycle_s) && !(green_s == cycle_s && lost_time_s == 0.0))
    throw ConfigError("green_s must lie in (0, cycle_s)");
  if (!(lost_time_s >= 0.0)) throw ConfigError("lost_time_s must be >= 0");
  if (!(effective_green_s() > 0.0)) throw ConfigError("lost time consumes the whole green");
  if (!std::isfinite(offset_s)) throw ConfigError("offset_s must be finite");
}

namespace {

// Start of the cycle containing t.
double start_of(const SignalTiming& sig, std::int64_t k) {
  return sig.offset_s + static_cast<double>(k) * sig.cycle_s;
}

// Index of the cycle containing t, consistent with start_of under rounding.
std::int64_t cycle_index(const SignalTiming& sig, double t) {
  auto k = static_cast<std::int64_t>(std::floor((t - sig.offset_s) / sig.cycle_s));
  while (start_of(sig, k) > t) --k;
  while (start_of(sig, k + 1) <= t) ++k;
  return k;
}

}  // namespace

double SignalTiming::next_green(double t) const {
  if (effective_green_s() >= cycle_s) return t;
  const auto k = cycle_index(*this, t);
  if (t < start_of(*this, k) + effective_green_s()) return t;
  return start_of(*this, k + 1);
}

bool SignalTiming::in_green(double t) const {
  if (effective_green_s() >= cycle_s) return true;
  return t < start_of(*this, cycle_index(*this, t)) + effective_green_s();
}

void DemandProfile::validate() const {
  if (!(arrival_rate_vph >= 0.0) || !std::isfinite(arrival_rate_vph))
    throw ConfigError("arrival_rate_vph must be >= 0");
  if (!(saturation_flow_vphpl > 0.0)) throw ConfigError("saturation_flow_vphpl must be > 0");
  if (!(duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
}

double capacity(const ApproachGeometry& geom, const SignalTiming& sig, const DemandProfile& dem) {
  return dem.saturation_flow_vphpl * static_cast<double>(geom.lanes) * sig.effective_green_s() /
         sig.cycle_s;
}

double saturation_headway_s(const ApproachGeometry& geom, const DemandProfile& dem) {
  return 3600.0 / (dem.saturation_flow_vphpl * static_cast<double>(geom.lanes));
}

EventLog simulate(const ApproachGeometry& geom, const SignalTiming& sig, const DemandProfile& dem) {
  geom.validate();
  sig.validate();
  dem.validate();

  EventLog log;
  if (dem.arrival_rate_vph == 0.0) return log;

  Rng rng(dem.seed);
  const double rate_per_s = dem.arrival_rate_vph / 3600.0;
  const auto cap = static_cast<std::size_t>(geom.capacity_vehicles());
  const double travel = geom.free_flow_time_s();
  const double headway = saturation_headway_s(geom, dem);

  // Departure times are kept even past the horizon: they gate later entries.
  std::vector<double> departures;
  double arrival = 0.0;
  for (std::int64_t id = 1;; ++id) {
    arrival += rng.exponential(rate_per_s);
    if (arrival >= dem.duration_s) break;

    const std::size_t i = departures.size();
    double entry = arrival;
    if (i >= cap) entry = std::max(entry, departures[i - cap]);  // spillback hold
    if (entry >= dem.duration_s) break;

    double depart = entry + travel;
    if (i > 0) depart = std::max(depart, departures.back() + headway);
    depart = sig.next_green(depart);
    departures.push_back(depart);

    VehicleRecord v;
    v.vehicle_id = id;
    v.t_entry = entry;
    if (depart <= dem.duration_s) v.t_exit = depart;
    log.push_back(v);
  }
  return log;
}

}  // namespace vcount
