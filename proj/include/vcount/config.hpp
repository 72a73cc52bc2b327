#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vcount/evaluation.hpp"

namespace vcount::config {

/// Flat `key = value` file. '#' starts a comment; blank lines are ignored.
/// Keys keep their first-seen order.
class KeyValues {
 public:
  static KeyValues parse(std::istream& in, std::string_view source = "<config>");
  static KeyValues load(const std::string& path);

  void set(std::string key, std::string value, int line = 0);
  [[nodiscard]] bool contains(std::string_view key) const;
  [[nodiscard]] const std::string* find(std::string_view key) const;

  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::vector<Entry> entries_;
};

/// Builds a scenario from defaults overridden by `kv`. Unknown keys and bad
/// values raise ConfigError with the source line.
[[nodiscard]] ScenarioConfig scenario_from(const KeyValues& kv);

/// Scenario keys plus `preset = tableN` and/or `sweep.<axis> = v1,v2,...`
/// lines, one axis per line in file order.
[[nodiscard]] SweepSpec sweep_from(const KeyValues& kv);

/// Canonical `key = value` text for a scenario; parses back to the same config.
[[nodiscard]] std::string to_text(const ScenarioConfig& scenario);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view text);

[[nodiscard]] std::vector<std::string> split_list(std::string_view text);

}  // namespace vcount::config
