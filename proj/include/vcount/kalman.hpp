#pragma once

#include <cstdint>
#include <optional>

namespace vcount {

/// Posterior of the scalar count filter.
struct FilterState {
  double n_hat = 0.0;  // vehicles
  double p_hat = 0.0;  // vehicles^2
  std::int64_t step = 0;
};

enum class MissingPolicy {
  paper_nan,     // step is recorded as undefined (NaN estimate)
  predict_only,  // prior is committed as the posterior
};

struct FilterConfig {
  double rho_fixed = 0.2;  // historical market penetration
  double rho_min = 0.5;    // floor on rho in the state equation; 0 disables it
  double r_meas = 5.0;     // measurement covariance R
  double n0 = 5.0;
  double p0 = 5.0;
  bool clamp_nonnegative = true;
  MissingPolicy missing_policy = MissingPolicy::paper_nan;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Inputs for one estimation step.
struct IntervalObservation {
  double t_end = 0.0;  // seconds; interval closes here
  double dt = 0.0;     // seconds, > 0
  std::int64_t a_p = 0;  // probe entries in the interval
  std::int64_t d_p = 0;  // probe stop-bar crossings in the interval
  std::optional<double> tt_mean;       // mean probe travel time, seconds
  std::optional<double> rho_interval;  // absent: use FilterConfig::rho_fixed
  std::optional<double> n_true;        // ground truth at t_end (evaluation only)
};

struct Prior {
  double n = 0.0;
  double p = 0.0;
};

/// What happened in one filter step. Undefined quantities are NaN.
struct StepRecord {
  std::int64_t step = 0;
  double interval_end_s = 0.0;
  double dt_s = 0.0;
  std::int64_t a_p = 0;
  std::int64_t d_p = 0;
  double rho_used = 0.0;
  double h = 0.0;
  double tt_measured = 0.0;
  double tt_prior = 0.0;
  double n_prior = 0.0;
  double gain = 0.0;
  double n_post = 0.0;
  double p_post = 0.0;
  std::optional<double> n_true;

  [[nodiscard]] bool defined() const;
};

/// Penetration rate for this interval before any floor is applied.
[[nodiscard]] double effective_rho(const IntervalObservation& obs, const FilterConfig& cfg);

/// State equation with the rho floor: n + (A_p - D_p) / max(rho, rho_min).
/// Covariance is carried unchanged.
[[nodiscard]] Prior predict(const FilterState& state, const IntervalObservation& obs,
                            const FilterConfig& cfg);

/// H = 2 rho dt / (A_p + D_p), in seconds per vehicle. rho is not floored here.
/// Throws MeasurementUnavailable when A_p + D_p == 0.
[[nodiscard]] double measurement_vector(const IntervalObservation& obs, const FilterConfig& cfg);

struct UpdateResult {
  FilterState state;
  double gain = 0.0;
  double tt_prior = 0.0;
};

/// Measurement correction with travel time `tt_measured`.
/// The returned state keeps `step` at 0; callers stamp it.
[[nodiscard]] UpdateResult update(const Prior& prior, double h, double tt_measured,
                                  const FilterConfig& cfg);

struct StepOutcome {
  FilterState state;
  StepRecord record;
};

/// predict, then update when a travel time and a measurement vector exist.
[[nodiscard]] StepOutcome step(const FilterState& state, const IntervalObservation& obs,
                               const FilterConfig& cfg);

/// Stateful wrapper that owns the running posterior.
class CountFilter {
 public:
  explicit CountFilter(FilterConfig cfg);

  StepRecord step(const IntervalObservation& obs);

  [[nodiscard]] const FilterState& state() const noexcept { return state_; }
  [[nodiscard]] const FilterConfig& config() const noexcept { return cfg_; }

 private:
  FilterConfig cfg_;
  FilterState state_;
};

}  // namespace vcount
