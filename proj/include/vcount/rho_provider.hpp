#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vcount/approach_sim.hpp"
#include "vcount/schedule.hpp"
#include "vcount/vehicle.hpp"

namespace vcount {

enum class DetectorLocation { none, entrance, middle, exit };

[[nodiscard]] std::string_view to_string(DetectorLocation loc);
/// Throws ConfigError on an unknown name.
[[nodiscard]] DetectorLocation parse_detector_location(std::string_view name);

struct DetectorSpec {
  DetectorLocation location = DetectorLocation::none;
  double position_m = 0.0;  // distance from the entrance

  /// Places the detector at 0, length/2 or length.
  [[nodiscard]] static DetectorSpec at(DetectorLocation loc, const ApproachGeometry& geom);
};

/// Time each vehicle passes a loop detector at spec.position_m.
///
/// Entrance and exit detectors reuse the logged crossings. A mid-block
/// detector is passed at t_entry + x / v_f unless the stop-bar queue, seen
/// as a physical queue at jam spacing, already reaches back past x; then it
/// is passed at t_exit - (L - x) / v_f. Vehicles without an exit time use
/// the free-flow rule.
class DetectorCrossings {
 public:
  DetectorCrossings(std::span<const VehicleRecord> log, const DetectorSpec& spec,
                    const ApproachGeometry& geom);

  [[nodiscard]] const DetectorSpec& spec() const noexcept { return spec_; }
  /// Crossing time per vehicle, parallel to the log; absent if never crossed.
  [[nodiscard]] std::span<const std::optional<double>> times() const noexcept { return times_; }

  /// Probe share of detector crossings in `interval` for a tagged copy of
  /// the same log. Falls back to rho_fixed when there are no crossings or no
  /// probe crossings, so the result is always in (0, 1].
  [[nodiscard]] double rho_for_interval(std::span<const VehicleRecord> tagged_log,
                                        const Interval& interval, double rho_fixed) const;

 private:
  DetectorSpec spec_;
  std::vector<std::optional<double>> times_;
};

/// One-shot form of DetectorCrossings::rho_for_interval. spec=none returns rho_fixed.
[[nodiscard]] double rho_for_interval(std::span<const VehicleRecord> tagged_log,
                                      const Interval& interval, const DetectorSpec& spec,
                                      const ApproachGeometry& geom, double rho_fixed);

}  // namespace vcount
