#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vcount/kalman.hpp"
#include "vcount/vehicle.hpp"

namespace vcount {

enum class IntervalMode { variable, fixed };

struct ScheduleConfig {
  IntervalMode mode = IntervalMode::variable;
  std::int64_t n_sample = 5;  // probe exits per interval (variable mode)
  double fixed_dt = 20.0;     // seconds (fixed mode)
  double t_start = 0.0;
  double t_end = 4500.0;

  void validate() const;
};

/// Half-open estimation interval (t_begin, t_end].
struct Interval {
  double t_begin = 0.0;
  double t_end = 0.0;
};

/// Cuts a tagged event log into filter observations.
///
/// Variable mode closes an interval at the stop-bar crossing of every n-th
/// probe; probes sharing that timestamp join the closing interval. A
/// trailing interval with fewer than n probe exits is dropped. Fixed mode
/// tiles [t_start, t_end) with fixed_dt steps, the last one possibly shorter.
///
/// Returns an empty sequence for an empty log. Throws NoProbesError in
/// variable mode when no probe crosses the stop bar inside the window.
/// rho_interval and n_true are left unset.
[[nodiscard]] std::vector<IntervalObservation> schedule(std::span<const VehicleRecord> log,
                                                        const ScheduleConfig& cfg);

/// Interval extents matching a schedule() result.
[[nodiscard]] std::vector<Interval> intervals_of(std::span<const IntervalObservation> obs,
                                                 double t_start);

/// Vehicles on the approach at each time t: entered at or before t and not
/// yet past the stop bar.
[[nodiscard]] std::vector<std::int64_t> ground_truth_counts(std::span<const VehicleRecord> log,
                                                            std::span<const double> boundaries);

/// Sorted-timestamp index answering ground-truth queries in O(log n).
class OccupancyIndex {
 public:
  explicit OccupancyIndex(std::span<const VehicleRecord> log);
  [[nodiscard]] std::int64_t count_at(double t) const;

 private:
  std::vector<double> entries_;
  std::vector<double> exits_;
};

}  // namespace vcount
