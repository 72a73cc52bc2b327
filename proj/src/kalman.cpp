#include "vcount/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vcount/errors.hpp"

namespace vcount {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_rho(double rho, const char* what) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw ConfigError(std::string(what) + " must lie in (0, 1], got " + std::to_string(rho));
}

}  // namespace

void FilterConfig::validate() const {
  require_rho(rho_fixed, "rho_fixed");
  if (!(rho_min >= 0.0 && rho_min <= 1.0))
    throw ConfigError("rho_min must lie in [0, 1], got " + std::to_string(rho_min));
  if (!(r_meas >= 0.0)) throw ConfigError("r_meas must be >= 0");
  if (!(p0 >= 0.0)) throw ConfigError("p0 must be >= 0");
  if (!std::isfinite(n0)) throw ConfigError("n0 must be finite");
}

bool StepRecord::defined() const { return !std::isnan(n_post); }

double effective_rho(const IntervalObservation& obs, const FilterConfig& cfg) {
  if (obs.rho_interval) {
    require_rho(*obs.rho_interval, "interval rho");
    return *obs.rho_interval;
  }
  require_rho(cfg.rho_fixed, "rho_fixed");
  return cfg.rho_fixed;
}

Prior predict(const FilterState& state, const IntervalObservation& obs, const FilterConfig& cfg) {
  const double rho = std::max(effective_rho(obs, cfg), cfg.rho_min);
  const auto net = static_cast<double>(obs.a_p - obs.d_p);
  double n = state.n_hat + net / rho;
  if (cfg.clamp_nonnegative) n = std::max(n, 0.0);
  return {n, state.p_hat};
}

double measurement_vector(const IntervalObservation& obs, const FilterConfig& cfg) {
  const auto flow = obs.a_p + obs.d_p;
  if (flow <= 0)
    throw MeasurementUnavailable("no probe arrivals or departures in the interval ending at " +
                                 std::to_string(obs.t_end));
  return 2.0 * effective_rho(obs, cfg) * obs.dt / static_cast<double>(flow);
}

UpdateResult update(const Prior& prior, double h, double tt_measured, const FilterConfig& cfg) {
  // Work with the dimensionless weight w = h*G = h^2 P / (h^2 P + R), which
  // stays in [0, 1] under rounding; G = w / h then respects G <= 1/h.
  const double hhp = h * h * prior.p;
  const double denom = hhp + cfg.r_meas;
  if (denom == 0.0) throw DegenerateFilter("zero prior covariance with zero measurement noise");

  UpdateResult out;
  out.tt_prior = h * prior.n;
  const double implied = tt_measured / h;
  double w = 0.0;
  if (cfg.r_meas == 0.0) {
    w = 1.0;
    out.gain = 1.0 / h;
    out.state.n_hat = implied;
  } else {
    w = hhp / denom;
    out.gain = w / h;
    out.state.n_hat = prior.n + out.gain * (tt_measured - out.tt_prior);
    out.state.n_hat =
        std::clamp(out.state.n_hat, std::min(prior.n, implied), std::max(prior.n, implied));
  }
  if (cfg.clamp_nonnegative) out.state.n_hat = std::max(out.state.n_hat, 0.0);
  out.state.p_hat = prior.p * (1.0 - w);
  return out;
}

StepOutcome step(const FilterState& state, const IntervalObservation& obs, const FilterConfig& cfg) {
  if (!(obs.dt > 0.0)) throw DataError("interval duration must be positive");
  if (obs.a_p < 0 || obs.d_p < 0) throw DataError("probe counts must be non-negative");

  const Prior prior = predict(state, obs, cfg);

  StepOutcome out;
  StepRecord& rec = out.record;
  rec.step = state.step + 1;
  rec.interval_end_s = obs.t_end;
  rec.dt_s = obs.dt;
  rec.a_p = obs.a_p;
  rec.d_p = obs.d_p;
  rec.rho_used = effective_rho(obs, cfg);
  rec.n_prior = prior.n;
  rec.n_true = obs.n_true;
  rec.tt_measured = obs.tt_mean.value_or(kNaN);

  const bool measurable = obs.tt_mean.has_value() && obs.a_p + obs.d_p > 0;
  if (measurable) {
    rec.h = measurement_vector(obs, cfg);
    const UpdateResult u = update(prior, rec.h, *obs.tt_mean, cfg);
    rec.tt_prior = u.tt_prior;
    rec.gain = u.gain;
    rec.n_post = u.state.n_hat;
    rec.p_post = u.state.p_hat;
    out.state = {u.state.n_hat, u.state.p_hat, rec.step};
    return out;
  }

  rec.h = obs.a_p + obs.d_p > 0 ? measurement_vector(obs, cfg) : kNaN;
  rec.tt_prior = std::isnan(rec.h) ? kNaN : rec.h * prior.n;
  rec.gain = kNaN;
  rec.p_post = prior.p;
  // The run continues from the prior either way; paper_nan only poisons the record.
  out.state = {prior.n, prior.p, rec.step};
  rec.n_post = cfg.missing_policy == MissingPolicy::predict_only ? prior.n : kNaN;
  if (cfg.missing_policy == MissingPolicy::predict_only) rec.gain = 0.0;
  return out;
}

CountFilter::CountFilter(FilterConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  state_ = {cfg_.n0, cfg_.p0, 0};
}

StepRecord CountFilter::step(const IntervalObservation& obs) {
  auto out = vcount::step(state_, obs, cfg_);
  state_ = out.state;
  return std::move(out.record);
}

}  // namespace vcount
