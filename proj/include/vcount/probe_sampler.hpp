#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vcount/vehicle.hpp"

namespace vcount {

enum class SamplingMethod {
  bernoulli,    // each vehicle independently with probability lmp
  exact_count,  // a uniformly random subset of round(lmp * N) vehicles
};

struct SamplingPlan {
  double lmp = 0.2;
  std::int64_t replications = 100;
  std::uint64_t base_seed = 1;
  SamplingMethod method = SamplingMethod::bernoulli;

  void validate() const;
  [[nodiscard]] std::uint64_t seed_for(std::int64_t replication) const {
    return base_seed + static_cast<std::uint64_t>(replication);
  }
};

/// Copy of `log` with is_probe redrawn. Timestamps and order are untouched.
[[nodiscard]] EventLog tag(std::span<const VehicleRecord> log, double lmp, std::uint64_t seed,
                           SamplingMethod method = SamplingMethod::bernoulli);

struct RealizedLmp {
  std::int64_t probe_count = 0;
  std::int64_t total_count = 0;
  std::optional<double> ratio;  // absent when total_count == 0
};

/// Probe share of stop-bar crossings in each (b[k-1], b[k]] for a boundary
/// list b of length K+1.
[[nodiscard]] std::vector<RealizedLmp> realized_lmp_per_interval(
    std::span<const VehicleRecord> tagged_log, std::span<const double> boundaries);

}  // namespace vcount
