#include "vcount/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "vcount/errors.hpp"

namespace vcount::csv {

namespace {

std::string format_metric(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_metric(const std::optional<double>& v) {
  return v ? format_metric(*v) : std::string{};
}

std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  out += '"';
  return out;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  [[nodiscard]] int number() const { return number_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("line " + std::to_string(number_) + ": " + what);
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

double parse_real(std::string_view s, const LineReader& r, const char* field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    r.fail(std::string("bad ") + field + " '" + std::string(s) + "'");
  return v;
}

double parse_real_or_nan(std::string_view s, const LineReader& r, const char* field) {
  return s.empty() ? std::nan("") : parse_real(s, r, field);
}

std::int64_t parse_int(std::string_view s, const LineReader& r, const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    r.fail(std::string("bad ") + field + " '" + std::string(s) + "'");
  return v;
}

void expect_header(LineReader& r, std::string_view header) {
  std::string line;
  if (!r.next(line)) throw DataError("empty file: expected header '" + std::string(header) + "'");
  if (line != header) r.fail("expected header '" + std::string(header) + "'");
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
}

std::string coord_header(const SweepTable& t) {
  std::string s;
  for (auto a : t.axes) {
    s += ',';
    s += to_string(a);
  }
  return s;
}

std::string coord_fields(const std::vector<std::string>& coords) {
  std::string s;
  for (const auto& c : coords) {
    s += ',';
    s += quote(c);
  }
  return s;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return {};
  char buf[512];
  for (int digits = 6; digits <= 40; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    double back = 0.0;
    std::string_view s(buf);
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back == value) return buf;
  }
  return buf;
}

void write_event_log(std::ostream& out, std::span<const VehicleRecord> log) {
  out << kEventLogHeader << '\n';
  for (const auto& v : log) {
    out << v.vehicle_id << ',' << format_real(v.t_entry) << ','
        << (v.t_exit ? format_real(*v.t_exit) : std::string{}) << ',' << (v.is_probe ? 1 : 0)
        << '\n';
  }
}

EventLog read_event_log(std::istream& in) {
  LineReader r(in);
  expect_header(r, kEventLogHeader);
  EventLog log;
  std::string line;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 4) r.fail("expected 4 fields, found " + std::to_string(f.size()));
    VehicleRecord v;
    v.vehicle_id = parse_int(f[0], r, "vehicle_id");
    v.t_entry = parse_real(f[1], r, "t_entry_s");
    if (!f[2].empty()) v.t_exit = parse_real(f[2], r, "t_exit_s");
    if (f[3] == "1" || f[3] == "true") {
      v.is_probe = true;
    } else if (f[3] == "0" || f[3] == "false") {
      v.is_probe = false;
    } else {
      r.fail("bad is_probe '" + std::string(f[3]) + "'");
    }
    if (!std::isfinite(v.t_entry)) r.fail("t_entry_s must be finite");
    if (v.t_exit && !(*v.t_exit > v.t_entry)) r.fail("t_exit_s must exceed t_entry_s");
    log.push_back(v);
  }
  validate_log(log);
  return log;
}

void write_step_records(std::ostream& out, std::span<const StepRecord> records) {
  out << kStepRecordHeader << '\n';
  for (const auto& s : records) {
    out << s.step << ',' << format_real(s.interval_end_s) << ',' << format_real(s.dt_s) << ','
        << s.a_p << ',' << s.d_p << ',' << format_real(s.rho_used) << ',' << format_real(s.h)
        << ',' << format_real(s.tt_measured) << ',' << format_real(s.tt_prior) << ','
        << format_real(s.n_prior) << ',' << format_real(s.gain) << ',' << format_real(s.n_post)
        << ',' << format_real(s.p_post) << ',' << (s.n_true ? format_real(*s.n_true) : "")
        << '\n';
  }
}

std::vector<StepRecord> read_step_records(std::istream& in) {
  LineReader r(in);
  expect_header(r, kStepRecordHeader);
  std::vector<StepRecord> out;
  std::string line;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 14) r.fail("expected 14 fields, found " + std::to_string(f.size()));
    StepRecord s;
    s.step = parse_int(f[0], r, "step");
    s.interval_end_s = parse_real(f[1], r, "interval_end_s");
    s.dt_s = parse_real(f[2], r, "dt_s");
    s.a_p = parse_int(f[3], r, "a_p");
    s.d_p = parse_int(f[4], r, "d_p");
    s.rho_used = parse_real(f[5], r, "rho_used");
    s.h = parse_real_or_nan(f[6], r, "h");
    s.tt_measured = parse_real_or_nan(f[7], r, "tt_measured");
    s.tt_prior = parse_real_or_nan(f[8], r, "tt_prior");
    s.n_prior = parse_real(f[9], r, "n_prior");
    s.gain = parse_real_or_nan(f[10], r, "gain");
    s.n_post = parse_real_or_nan(f[11], r, "n_post");
    s.p_post = parse_real_or_nan(f[12], r, "p_post");
    if (!f[13].empty()) s.n_true = parse_real(f[13], r, "n_true");
    out.push_back(s);
  }
  return out;
}

void write_sweep_rows(std::ostream& out, const SweepTable& table, const Metadata& meta) {
  write_metadata(out, meta);
  out << "cell" << coord_header(table)
      << ",replication,rrmse_pct,rmse_veh,n_steps,undefined_steps,mean_dt_s,max_dt_s,error\n";
  for (const auto& r : table.rows) {
    out << r.cell << coord_fields(r.coords) << ',' << r.replication << ','
        << format_metric(r.rrmse_pct) << ',' << format_metric(r.rmse_veh) << ',' << r.n_steps
        << ',' << r.undefined_steps << ',' << format_metric(r.mean_dt_s) << ','
        << format_metric(r.max_dt_s) << ',' << quote(r.error) << '\n';
  }
}

void write_sweep_aggregates(std::ostream& out, const SweepTable& table, const Metadata& meta) {
  write_metadata(out, meta);
  out << "cell" << coord_header(table)
      << ",runs,defined_runs,undefined_runs,failed_runs,mean_rrmse_pct,sd_rrmse_pct,"
         "pooled_rrmse_pct,mean_rmse_veh,sd_rmse_veh,pooled_rmse_veh,mean_dt_s,max_dt_s\n";
  for (std::size_t c = 0; c < table.aggregates.size(); ++c) {
    const auto& a = table.aggregates[c];
    out << c << coord_fields(a.coords) << ',' << a.runs << ',' << a.defined_runs << ','
        << a.undefined_runs << ',' << a.failed_runs << ',' << format_metric(a.mean_rrmse_pct)
        << ',' << format_metric(a.sd_rrmse_pct) << ',' << format_metric(a.pooled_rrmse_pct) << ','
        << format_metric(a.mean_rmse_veh) << ',' << format_metric(a.sd_rmse_veh) << ','
        << format_metric(a.pooled_rmse_veh) << ',' << format_metric(a.mean_dt_s) << ','
        << format_metric(a.max_dt_s) << '\n';
  }
}

void write_plot_data(std::ostream& out, const SweepTable& table) {
  out << "axis,group,x,metric,mean,stddev\n";
  for (std::size_t ax = 0; ax < table.axes.size(); ++ax) {
    for (const auto& a : table.aggregates) {
      std::string group;
      for (std::size_t other = 0; other < table.axes.size(); ++other) {
        if (other == ax) continue;
        if (!group.empty()) group += ';';
        group += std::string(to_string(table.axes[other])) + '=' + a.coords[other];
      }
      const std::string prefix =
          std::string(to_string(table.axes[ax])) + ',' + quote(group) + ',' + quote(a.coords[ax]);
      out << prefix << ",rrmse_pct," << format_metric(a.mean_rrmse_pct) << ','
          << format_metric(a.sd_rrmse_pct) << '\n';
      out << prefix << ",rmse_veh," << format_metric(a.mean_rmse_veh) << ','
          << format_metric(a.sd_rmse_veh) << '\n';
      out << prefix << ",mean_dt_s," << format_metric(a.mean_dt_s) << ",\n";
    }
  }
}

}  // namespace vcount::csv
