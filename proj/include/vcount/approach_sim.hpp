#pragma once

#include <cstdint>

#include "vcount/vehicle.hpp"

namespace vcount {

struct ApproachGeometry {
  double length_m = 74.0;
  std::int64_t lanes = 1;
  double free_flow_speed_kmh = 40.0;
  double jam_density_veh_per_km_per_lane = 160.0;

  void validate() const;
  /// floor(length_km * jam density * lanes)
  [[nodiscard]] std::int64_t capacity_vehicles() const;
  [[nodiscard]] double free_flow_speed_mps() const { return free_flow_speed_kmh / 3.6; }
  [[nodiscard]] double free_flow_time_s() const { return length_m / free_flow_speed_mps(); }
  /// Road length one stopped vehicle occupies in a lane-averaged queue.
  [[nodiscard]] double jam_spacing_m() const;
};

/// Fixed-time signal. Departures are allowed in
/// [offset + k*cycle, offset + k*cycle + green - lost_time).
struct SignalTiming {
  double cycle_s = 120.0;
  double green_s = 60.0;
  double lost_time_s = 3.0;
  double offset_s = 0.0;

  void validate() const;
  [[nodiscard]] double effective_green_s() const { return green_s - lost_time_s; }
  /// Earliest time >= t inside an effective green window.
  [[nodiscard]] double next_green(double t) const;
  [[nodiscard]] bool in_green(double t) const;
};

struct DemandProfile {
  double arrival_rate_vph = 650.0;
  double saturation_flow_vphpl = 1800.0;
  std::uint64_t seed = 1;
  double duration_s = 4500.0;

  void validate() const;
};

/// Approach capacity in veh/h: saturation flow * lanes * effective green / cycle.
[[nodiscard]] double capacity(const ApproachGeometry& geom, const SignalTiming& sig,
                              const DemandProfile& dem);

/// Seconds between successive stop-bar departures during green.
[[nodiscard]] double saturation_headway_s(const ApproachGeometry& geom, const DemandProfile& dem);

/// Point-queue simulation of one signalized approach.
///
/// Poisson arrivals reach the entrance observer; a vehicle enters once the
/// approach holds fewer than capacity_vehicles(), drives at free-flow speed to
/// the stop bar, and departs FIFO at the first green instant that respects the
/// saturation headway behind its leader. Vehicles that have not entered by
/// duration_s are dropped; those still on the approach get no exit time.
[[nodiscard]] EventLog simulate(const ApproachGeometry& geom, const SignalTiming& sig,
                                const DemandProfile& dem);

}  // namespace vcount
