#include "vcount/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "vcount/errors.hpp"

namespace vcount::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const KeyValues::Entry& e, const std::string& source, const std::string& why) {
  throw ConfigError(source + ":" + std::to_string(e.line) + ": " + e.key + ": " + why);
}

double to_real(const KeyValues::Entry& e, const std::string& src) {
  double v = 0.0;
  const auto& s = e.value;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
    bad(e, src, "expected a number, got '" + s + "'");
  return v;
}

std::int64_t to_int(const KeyValues::Entry& e, const std::string& src) {
  std::int64_t v = 0;
  const auto& s = e.value;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    bad(e, src, "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t to_uint(const KeyValues::Entry& e, const std::string& src) {
  std::uint64_t v = 0;
  const auto& s = e.value;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    bad(e, src, "expected a non-negative integer, got '" + s + "'");
  return v;
}

bool to_bool(const KeyValues::Entry& e, const std::string& src) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  bad(e, src, "expected true or false, got '" + e.value + "'");
}

using Setter = std::function<void(ScenarioConfig&, const KeyValues::Entry&, const std::string&)>;

const std::vector<std::pair<std::string_view, Setter>>& setters() {
  static const std::vector<std::pair<std::string_view, Setter>> table = {
      {"length_m", [](auto& s, auto& e, auto& src) { s.geometry.length_m = to_real(e, src); }},
      {"lanes", [](auto& s, auto& e, auto& src) { s.geometry.lanes = to_int(e, src); }},
      {"free_flow_speed_kmh",
       [](auto& s, auto& e, auto& src) { s.geometry.free_flow_speed_kmh = to_real(e, src); }},
      {"jam_density_veh_per_km_per_lane",
       [](auto& s, auto& e, auto& src) {
         s.geometry.jam_density_veh_per_km_per_lane = to_real(e, src);
       }},
      {"cycle_s", [](auto& s, auto& e, auto& src) { s.signal.cycle_s = to_real(e, src); }},
      {"green_s", [](auto& s, auto& e, auto& src) { s.signal.green_s = to_real(e, src); }},
      {"lost_time_s", [](auto& s, auto& e, auto& src) { s.signal.lost_time_s = to_real(e, src); }},
      {"offset_s", [](auto& s, auto& e, auto& src) { s.signal.offset_s = to_real(e, src); }},
      {"arrival_rate_vph",
       [](auto& s, auto& e, auto& src) { s.demand.arrival_rate_vph = to_real(e, src); }},
      {"vc_ratio", [](auto& s, auto& e, auto& src) { s.vc_ratio = to_real(e, src); }},
      {"saturation_flow_vphpl",
       [](auto& s, auto& e, auto& src) { s.demand.saturation_flow_vphpl = to_real(e, src); }},
      {"sim_seed", [](auto& s, auto& e, auto& src) { s.demand.seed = to_uint(e, src); }},
      {"duration_s", [](auto& s, auto& e, auto& src) { s.demand.duration_s = to_real(e, src); }},
      {"lmp", [](auto& s, auto& e, auto& src) { s.sampling.lmp = to_real(e, src); }},
      {"replications",
       [](auto& s, auto& e, auto& src) { s.sampling.replications = to_int(e, src); }},
      {"base_seed", [](auto& s, auto& e, auto& src) { s.sampling.base_seed = to_uint(e, src); }},
      {"sampling_method",
       [](auto& s, auto& e, auto& src) {
         if (e.value == "bernoulli") s.sampling.method = SamplingMethod::bernoulli;
         else if (e.value == "exact_count") s.sampling.method = SamplingMethod::exact_count;
         else bad(e, src, "expected bernoulli or exact_count");
       }},
      {"mode",
       [](auto& s, auto& e, auto& src) {
         if (e.value == "variable") s.schedule.mode = IntervalMode::variable;
         else if (e.value == "fixed") s.schedule.mode = IntervalMode::fixed;
         else bad(e, src, "expected variable or fixed");
       }},
      {"n_sample", [](auto& s, auto& e, auto& src) { s.schedule.n_sample = to_int(e, src); }},
      {"fixed_dt", [](auto& s, auto& e, auto& src) { s.schedule.fixed_dt = to_real(e, src); }},
      {"t_start", [](auto& s, auto& e, auto& src) { s.schedule.t_start = to_real(e, src); }},
      {"t_end", [](auto& s, auto& e, auto& src) { s.schedule.t_end = to_real(e, src); }},
      {"rho_fixed", [](auto& s, auto& e, auto& src) { s.rho_fixed = to_real(e, src); }},
      {"rho_min", [](auto& s, auto& e, auto& src) { s.filter.rho_min = to_real(e, src); }},
      {"r_meas", [](auto& s, auto& e, auto& src) { s.filter.r_meas = to_real(e, src); }},
      {"n0", [](auto& s, auto& e, auto& src) { s.filter.n0 = to_real(e, src); }},
      {"p0", [](auto& s, auto& e, auto& src) { s.filter.p0 = to_real(e, src); }},
      {"clamp_nonnegative",
       [](auto& s, auto& e, auto& src) { s.filter.clamp_nonnegative = to_bool(e, src); }},
      {"missing_policy",
       [](auto& s, auto& e, auto& src) {
         if (e.value == "paper_nan") s.filter.missing_policy = MissingPolicy::paper_nan;
         else if (e.value == "predict_only") s.filter.missing_policy = MissingPolicy::predict_only;
         else bad(e, src, "expected paper_nan or predict_only");
       }},
      {"detector",
       [](auto& s, auto& e, auto& src) {
         try {
           s.detector = parse_detector_location(e.value);
         } catch (const ConfigError& err) {
           bad(e, src, err.what());
         }
       }},
  };
  return table;
}

ScenarioConfig scenario_impl(const KeyValues& kv, bool allow_sweep_keys) {
  ScenarioConfig s = default_scenario();
  for (const auto& e : kv.entries()) {
    if (e.key.starts_with("output.")) continue;
    if (allow_sweep_keys && (e.key == "preset" || e.key.starts_with("sweep."))) continue;
    bool found = false;
    for (const auto& [key, set] : setters()) {
      if (key == e.key) {
        set(s, e, kv.source());
        found = true;
        break;
      }
    }
    if (!found) bad(e, kv.source(), "unknown key");
  }
  if (!kv.contains("t_end")) s.schedule.t_end = s.demand.duration_s;
  try {
    s.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(kv.source() + ": " + err.what());
  }
  return s;
}

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in, std::string_view source) {
  KeyValues kv;
  kv.source_ = std::string(source);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(kv.source_ + ":" + std::to_string(line) + ": expected 'key = value'");
    const auto key = trim(s.substr(0, eq));
    const auto value = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError(kv.source_ + ":" + std::to_string(line) + ": empty key");
    if (kv.contains(key))
      throw ConfigError(kv.source_ + ":" + std::to_string(line) + ": duplicate key '" +
                        std::string(key) + "'");
    kv.entries_.push_back({std::string(key), std::string(value), line});
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse(in, path);
}

void KeyValues::set(std::string key, std::string value, int line) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = std::move(value);
      e.line = line;
      return;
    }
  }
  entries_.push_back({std::move(key), std::move(value), line});
}

bool KeyValues::contains(std::string_view key) const { return find(key) != nullptr; }

const std::string* KeyValues::find(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e.value;
  return nullptr;
}

ScenarioConfig scenario_from(const KeyValues& kv) { return scenario_impl(kv, false); }

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = trim(text.substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

SweepSpec sweep_from(const KeyValues& kv) {
  const ScenarioConfig base = scenario_impl(kv, true);
  SweepSpec spec;
  if (const auto* preset = kv.find("preset")) {
    spec = sweep_preset(*preset, base);
  } else {
    spec.base = base;
  }
  for (const auto& e : kv.entries()) {
    if (!e.key.starts_with("sweep.")) continue;
    AxisValues axis;
    try {
      axis.axis = parse_sweep_axis(std::string_view(e.key).substr(6));
    } catch (const ConfigError& err) {
      bad(e, kv.source(), err.what());
    }
    axis.values = split_list(e.value);
    if (axis.values.empty()) bad(e, kv.source(), "no values");
    // An explicit axis replaces the preset's axis of the same kind.
    std::erase_if(spec.axes, [&](const AxisValues& a) { return a.axis == axis.axis; });
    spec.axes.push_back(std::move(axis));
  }
  try {
    spec.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(kv.source() + ": " + err.what());
  }
  return spec;
}

std::string to_text(const ScenarioConfig& s) {
  std::ostringstream o;
  o << "length_m = " << real_text(s.geometry.length_m) << '\n'
    << "lanes = " << s.geometry.lanes << '\n'
    << "free_flow_speed_kmh = " << real_text(s.geometry.free_flow_speed_kmh) << '\n'
    << "jam_density_veh_per_km_per_lane = "
    << real_text(s.geometry.jam_density_veh_per_km_per_lane) << '\n'
    << "cycle_s = " << real_text(s.signal.cycle_s) << '\n'
    << "green_s = " << real_text(s.signal.green_s) << '\n'
    << "lost_time_s = " << real_text(s.signal.lost_time_s) << '\n'
    << "offset_s = " << real_text(s.signal.offset_s) << '\n'
    << "arrival_rate_vph = " << real_text(s.demand.arrival_rate_vph) << '\n';
  if (s.vc_ratio) o << "vc_ratio = " << real_text(*s.vc_ratio) << '\n';
  o << "saturation_flow_vphpl = " << real_text(s.demand.saturation_flow_vphpl) << '\n'
    << "sim_seed = " << s.demand.seed << '\n'
    << "duration_s = " << real_text(s.demand.duration_s) << '\n'
    << "lmp = " << real_text(s.sampling.lmp) << '\n'
    << "replications = " << s.sampling.replications << '\n'
    << "base_seed = " << s.sampling.base_seed << '\n'
    << "sampling_method = "
    << (s.sampling.method == SamplingMethod::bernoulli ? "bernoulli" : "exact_count") << '\n'
    << "mode = " << (s.schedule.mode == IntervalMode::variable ? "variable" : "fixed") << '\n'
    << "n_sample = " << s.schedule.n_sample << '\n'
    << "fixed_dt = " << real_text(s.schedule.fixed_dt) << '\n'
    << "t_start = " << real_text(s.schedule.t_start) << '\n'
    << "t_end = " << real_text(s.schedule.t_end) << '\n';
  if (s.rho_fixed) o << "rho_fixed = " << real_text(*s.rho_fixed) << '\n';
  o << "rho_min = " << real_text(s.filter.rho_min) << '\n'
    << "r_meas = " << real_text(s.filter.r_meas) << '\n'
    << "n0 = " << real_text(s.filter.n0) << '\n'
    << "p0 = " << real_text(s.filter.p0) << '\n'
    << "clamp_nonnegative = " << (s.filter.clamp_nonnegative ? "true" : "false") << '\n'
    << "missing_policy = "
    << (s.filter.missing_policy == MissingPolicy::paper_nan ? "paper_nan" : "predict_only") << '\n'
    << "detector = " << to_string(s.detector) << '\n';
  return o.str();
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vcount::config
