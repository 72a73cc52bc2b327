#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vcount {

/// One vehicle's crossings of the entrance observer and the stop bar.
struct VehicleRecord {
  std::int64_t vehicle_id = 0;
  double t_entry = 0.0;
  std::optional<double> t_exit;  // absent: still on the approach at run end
  bool is_probe = false;

  friend bool operator==(const VehicleRecord&, const VehicleRecord&) = default;
};

using EventLog = std::vector<VehicleRecord>;

/// Throws DataError when ids repeat or an exit does not follow its entry.
void validate_log(std::span<const VehicleRecord> log);

}  // namespace vcount
