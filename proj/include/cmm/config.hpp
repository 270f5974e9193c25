#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmm/linear_model.hpp"
#include "cmm/output_mode.hpp"
#include "cmm/pipeline.hpp"
#include "cmm/table.hpp"
#include "cmm/time_domain.hpp"

namespace cmm {

/// Unresolved "section.key" -> value text, with where it came from.
struct RawEntry {
  std::string value;
  int line = 0;         // 0 for command-line overrides
  std::string origin;   // file name or "--set"
};

class RawConfig {
 public:
  /// Parses "[section]" headers, "key = value" lines, '#' / ';' comments.
  /// Throws ConfigError with the line number on malformed input, unknown
  /// sections or keys, and duplicate keys.
  static RawConfig parse(std::string_view text, const std::string& origin = "config");

  /// Applies "section.key=value"; later calls win.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value, const std::string& origin);

  void erase(const std::string& key) { entries_.erase(key); }
  const RawEntry* find(const std::string& key) const;
  const std::map<std::string, RawEntry>& entries() const { return entries_; }

 private:
  std::map<std::string, RawEntry> entries_;
};

struct RunConfig {
  Scenario scenario;
  std::optional<SweepSpec> sweep;
  EvaluateOptions evaluate;
  CombOptions comb;
  StabilityEdgeOptions stability;
  std::optional<double> stability_phase;  // unset: phase of the steady-state G_m
  int workers = 0;                        // 0: hardware concurrency
  Format format = Format::Csv;
  std::string out;                        // empty: stdout
  std::vector<std::string> resolved;      // canonical "key = value" lines, SI units
  std::string digest;                     // FNV-1a of the resolved lines

  /// Recomputes `resolved` and `digest` from the fields above.
  void refresh_echo();
};

/// Resolves units and defaults. Frequencies and rates are read as w / 2pi
/// (Hz, kHz, MHz, GHz) or in rad/s, or relative to omega_b, kappa_m, kappa_a
/// (total); temperatures in K / mK / uK; powers in W / mW / uW; times in
/// s / ms / us / ns. Unspecified keys take the baseline values.
RunConfig resolve_config(const RawConfig& raw);

std::string read_text_file(const std::string& path);

/// presets/<name>.conf; the directory can be overridden with CMM_PRESET_DIR.
std::string preset_path(const std::string& name);

/// Keys accepted in each section, for diagnostics and documentation.
const std::map<std::string, std::vector<std::string>>& known_keys();

}  // namespace cmm
