#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vcount/evaluation.hpp"
#include "vcount/kalman.hpp"
#include "vcount/vehicle.hpp"

namespace vcount::csv {

inline constexpr std::string_view kEventLogHeader = "vehicle_id,t_entry_s,t_exit_s,is_probe";
inline constexpr std::string_view kStepRecordHeader =
    "step,interval_end_s,dt_s,a_p,d_p,rho_used,h,tt_measured,tt_prior,n_prior,gain,n_post,"
    "p_post,n_true";

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Fixed-point decimal with at least six fractional digits that parses back
/// to the identical double. NaN is written as an empty field.
[[nodiscard]] std::string format_real(double value);

void write_event_log(std::ostream& out, std::span<const VehicleRecord> log);
/// Throws DataError naming the offending line.
[[nodiscard]] EventLog read_event_log(std::istream& in);

void write_step_records(std::ostream& out, std::span<const StepRecord> records);
[[nodiscard]] std::vector<StepRecord> read_step_records(std::istream& in);

/// Long-form table, one row per (cell, replication), after `# key=value` lines.
void write_sweep_rows(std::ostream& out, const SweepTable& table, const Metadata& meta);
/// One row per cell.
void write_sweep_aggregates(std::ostream& out, const SweepTable& table, const Metadata& meta);
/// (axis, x, mean, stddev) series of replication-mean RRMSE and RMSE per axis
/// value, with any other axes held in the `group` column.
void write_plot_data(std::ostream& out, const SweepTable& table);

}  // namespace vcount::csv
