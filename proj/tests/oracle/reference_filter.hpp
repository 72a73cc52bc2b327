#pragma once

// Test-only oracles. Nothing here calls into the library's algorithms; the
// code is a direct, unoptimized transcription kept for cross-checking.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vcount/vehicle.hpp"

namespace oracle {

struct Obs {
  double t_end;
  double dt;
  double a_p;
  double d_p;
  double tt;   // NaN when no probe crossed the stop bar
  double rho;  // penetration for this interval
  double n_true;
};

struct Row {
  double n_prior, h, tt_prior, gain, n_post, p_post;
};

// Brute-force ground truth: scan every vehicle for every time.
inline std::int64_t count_on_approach(const std::vector<vcount::VehicleRecord>& log, double t) {
  std::int64_t n = 0;
  for (const auto& v : log) {
    const bool entered = v.t_entry <= t;
    const bool left = v.t_exit.has_value() && *v.t_exit <= t;
    if (entered && !left) ++n;
  }
  return n;
}

// Variable-interval construction by scanning all vehicles per interval.
// detector: 0 none, 1 entrance, 2 exit.
inline std::vector<Obs> variable_intervals(const std::vector<vcount::VehicleRecord>& log, int n,
                                           double t_start, double t_end, int detector,
                                           double rho_fixed) {
  std::vector<double> exits;
  for (const auto& v : log)
    if (v.is_probe && v.t_exit && *v.t_exit > t_start && *v.t_exit <= t_end)
      exits.push_back(*v.t_exit);
  std::sort(exits.begin(), exits.end());

  std::vector<Obs> out;
  double prev = t_start;
  std::size_t i = 0;
  while (i + n <= exits.size()) {
    std::size_t last = i + n - 1;
    while (last + 1 < exits.size() && exits[last + 1] == exits[last]) ++last;
    const double t = exits[last];
    Obs o{};
    o.t_end = t;
    o.dt = t - prev;
    double tt_sum = 0;
    int tt_n = 0;
    double probe_det = 0, total_det = 0;
    for (const auto& v : log) {
      if (v.is_probe && v.t_entry > prev && v.t_entry <= t) o.a_p += 1;
      if (v.is_probe && v.t_exit && *v.t_exit > prev && *v.t_exit <= t) {
        o.d_p += 1;
        tt_sum += *v.t_exit - v.t_entry;
        ++tt_n;
      }
      std::optional<double> cross;
      if (detector == 1) cross = v.t_entry;
      if (detector == 2) cross = v.t_exit;
      if (cross && *cross > prev && *cross <= t) {
        total_det += 1;
        if (v.is_probe) probe_det += 1;
      }
    }
    o.tt = tt_sum / tt_n;
    o.rho = (detector == 0 || probe_det == 0) ? rho_fixed : probe_det / total_det;
    o.n_true = static_cast<double>(count_on_approach(log, t));
    out.push_back(o);
    prev = t;
    i = last + 1;
  }
  return out;
}

// The recursion, one equation per line.
inline std::vector<Row> run_filter(const std::vector<Obs>& obs, double rho_min, double R,
                                   double n0, double p0, bool clamp) {
  std::vector<Row> rows;
  double n_plus = n0;
  double p_plus = p0;
  for (const auto& o : obs) {
    Row r{};
    const double rho_state = std::max(o.rho, rho_min);
    r.n_prior = n_plus + (o.a_p - o.d_p) / rho_state;
    if (clamp && r.n_prior < 0) r.n_prior = 0;
    const double p_prior = p_plus;
    r.h = 2.0 * o.rho * o.dt / (o.a_p + o.d_p);
    r.tt_prior = r.h * r.n_prior;
    r.gain = p_prior * r.h / (r.h * p_prior * r.h + R);
    r.n_post = r.n_prior + r.gain * (o.tt - r.tt_prior);
    if (clamp && r.n_post < 0) r.n_post = 0;
    r.p_post = p_prior * (1.0 - r.h * r.gain);
    rows.push_back(r);
    n_plus = r.n_post;
    p_plus = r.p_post;
  }
  return rows;
}

inline bool close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace oracle
