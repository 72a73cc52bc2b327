#include "vcount/probe_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vcount/errors.hpp"
#include "vcount/rng.hpp"

namespace vcount {

void SamplingPlan::validate() const {
  if (!(lmp > 0.0 && lmp <= 1.0)) throw ConfigError("lmp must lie in (0, 1]");
  if (replications < 1) throw ConfigError("replications must be >= 1");
}

EventLog tag(std::span<const VehicleRecord> log, double lmp, std::uint64_t seed,
             SamplingMethod method) {
  if (!(lmp > 0.0 && lmp <= 1.0)) throw ConfigError("lmp must lie in (0, 1]");
  EventLog out(log.begin(), log.end());
  Rng rng(seed);

  if (method == SamplingMethod::bernoulli) {
    for (auto& v : out) v.is_probe = rng.bernoulli(lmp);
    return out;
  }

  // Partial Fisher-Yates over indices picks k distinct vehicles.
  const auto k = static_cast<std::size_t>(std::llround(lmp * static_cast<double>(out.size())));
  std::vector<std::size_t> idx(out.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (auto& v : out) v.is_probe = false;
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
    out[idx[i]].is_probe = true;
  }
  return out;
}

std::vector<RealizedLmp> realized_lmp_per_interval(std::span<const VehicleRecord> tagged_log,
                                                   std::span<const double> boundaries) {
  if (boundaries.size() < 2) return {};
  std::vector<std::pair<double, bool>> exits;
  for (const auto& v : tagged_log)
    if (v.t_exit) exits.emplace_back(*v.t_exit, v.is_probe);
  std::sort(exits.begin(), exits.end());

  std::vector<RealizedLmp> out(boundaries.size() - 1);
  auto it = std::upper_bound(exits.begin(), exits.end(), boundaries.front(),
                             [](double t, const auto& e) { return t < e.first; });
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    auto& cell = out[k - 1];
    for (; it != exits.end() && it->first <= boundaries[k]; ++it) {
      ++cell.total_count;
      if (it->second) ++cell.probe_count;
    }
    if (cell.total_count > 0)
      cell.ratio = static_cast<double>(cell.probe_count) / static_cast<double>(cell.total_count);
  }
  return out;
}

}  // namespace vcount
