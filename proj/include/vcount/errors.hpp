#pragma once

#include <stdexcept>
#include <string>

namespace vcount {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  data_error = 3,
  degenerate = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual ExitCode exit_code() const noexcept = 0;
};

/// Invalid parameter values or malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::config_error; }
};

/// Unreadable or malformed input data (event logs, record files).
class DataError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::data_error; }
};

/// No probe arrivals or departures in an interval, so H is undefined.
class MeasurementUnavailable : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::degenerate; }
};

/// Kalman gain is 0/0 (R == 0 and P- == 0).
class DegenerateFilter : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::degenerate; }
};

/// The observation window holds no probe stop-bar crossings at all.
class NoProbesError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::degenerate; }
};

}  // namespace vcount
