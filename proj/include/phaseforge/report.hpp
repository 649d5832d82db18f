#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phaseforge/engine.hpp"

namespace phaseforge {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// One scenario: a command plus its parameters.
///
/// Text form is one `key=value` per line; blank lines and lines starting with
/// '#' are ignored. Unknown keys are rejected.
struct ScenarioConfig {
  std::string command = "model verify";
  std::string ring = "chain:2:2";
  std::size_t rank = 1;
  std::string family = "deg2";
  std::vector<std::string> strategies{"default"};
  std::size_t cap = 1'000'000;
  unsigned workers = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  /// Phases adjoined by `model boundary`, e.g. `cubic:x1x2x3` or `poly:x1x2;x2x3`.
  std::string extra;
  /// Phase table file for `phase analyze|derive`.
  std::string input;
  /// Increments for `phase derive`, as packed indices separated by commas.
  std::string increments;
  bool weak = false;
  std::optional<std::size_t> character;

  static ScenarioConfig parse(std::string_view text);
  /// Sets one key from text; throws ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  /// Canonical text form; parse(emit()) reproduces the config.
  std::string emit() const;

  std::vector<Strategy> strategy_list() const;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

using Json = nlohmann::ordered_json;

struct CheckRecord {
  std::string name;
  /// "pass", "fail" or "capacity".
  std::string verdict;
  Json data = Json::object();
  double seconds = 0;
};

struct Report {
  std::string command;
  ScenarioConfig config;
  std::vector<CheckRecord> checks;
  /// Run facts that may differ between identical runs (cache use).
  Json volatile_notes = Json::object();

  /// "pass" unless some check failed ("fail") or hit a capacity limit ("capacity").
  std::string verdict() const;
  int exit_code() const;
  /// Everything except timing and volatile notes; worker count and output
  /// settings are left out of the embedded config.
  Json stable_json() const;
  std::string digest() const;
  Json to_json() const;
  std::string to_text() const;
};

/// Runs the configured command. Throws ConfigError for invalid configs.
/// Capacity limits inside a check become "capacity" verdicts.
Report run_scenario(const ScenarioConfig& config);

enum class ReportFormat { Json, Text };
ReportFormat parse_format(std::string_view name);

/// Writes the report; throws std::runtime_error naming the path on I/O failure.
void emit_report(const Report& report, ReportFormat format, const std::filesystem::path& path);
std::string render_report(const Report& report, ReportFormat format);

struct ReportDiff {
  bool identical = false;
  std::vector<std::string> differences;
};

/// Compares the stable sections of two JSON report files.
ReportDiff diff_reports(const std::filesystem::path& a, const std::filesystem::path& b);

/// Phase table text: `ring=<spec> n=<rank>` then one ring index per line.
PhaseFunction parse_phase_text(std::string_view text);
std::string format_phase_text(const PhaseFunction& phi);

/// The scenarios making up the full verification run.
std::vector<ScenarioConfig> verification_suite(unsigned workers);

}  // namespace phaseforge
