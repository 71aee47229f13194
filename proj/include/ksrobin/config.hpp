#pragma once

// Line-oriented configuration files:
//
//   # comment
//   params.chi = 0.14
//   output.snapshot_times = 0, 0.02, 0.04
//
// Keys are dotted, one assignment per line, duplicates rejected. Every error
// names the source and line.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ksrobin/solver.hpp"

namespace ksr {

struct ConfigEntry {
  std::string value;
  int line{0};
};

class ConfigDocument {
public:
  ConfigDocument() = default;
  explicit ConfigDocument(std::string source) : source_(std::move(source)) {}

  const std::string& source() const { return source_; }
  const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const ConfigEntry* find(const std::string& key) const;

  /// Throws ValidationError on a duplicate key.
  void set(const std::string& key, std::string value, int line);
  /// Inserts or replaces.
  void assign(const std::string& key, ConfigEntry entry) { entries_[key] = std::move(entry); }

  /// "source:line: message" (line omitted when 0).
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

private:
  std::string source_{"<config>"};
  std::map<std::string, ConfigEntry> entries_;
};

ConfigDocument parse_config(std::string_view text, std::string source = "<config>");
/// Reads and parses a file; an unreadable file is a ComputeError.
ConfigDocument load_config(const std::string& path);

std::string format_double(double x);
std::string format_list(const std::vector<double>& xs);
double parse_double(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);

/// True for keys that map onto RunConfig fields.
bool is_run_key(std::string_view key);
const std::vector<std::string>& run_keys();

/// Applies one run key to a config; throws ValidationError on a bad value.
void apply_run_key(RunConfig& config, const std::string& key, const std::string& value);

/// Builds a RunConfig from the run keys of a document (defaults elsewhere).
/// Keys outside the run set are ignored here; callers check them.
RunConfig to_run_config(const ConfigDocument& doc);

/// Fully resolved key = value listing in fixed key order. Parsing the echo
/// reproduces the same configuration.
std::string echo_run_config(const RunConfig& config);

/// 64-bit FNV-1a of a canonical text, as 16 hex digits.
std::string content_hash(std::string_view canonical);

struct OutputSpec {
  std::string dir{"out"};
  std::size_t snapshot_resolution{128};
};

OutputSpec to_output_spec(const ConfigDocument& doc);

struct CompareSpec {
  RunConfig base;
  OutputSpec output;
  /// Variant names in listed order with their resolved configs.
  std::vector<std::pair<std::string, RunConfig>> variants;
  std::string canonical;
};

CompareSpec to_compare_spec(const ConfigDocument& doc);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct SweepSpec {
  RunConfig base;
  OutputSpec output;
  std::vector<SweepAxis> axes; ///< sorted by key
  bool classify_only{false};
  std::optional<double> trace_c;
  std::string canonical;
};

SweepSpec to_sweep_spec(const ConfigDocument& doc);

struct RunSpec {
  RunConfig config;
  OutputSpec output;
  std::string canonical;
};

RunSpec to_run_spec(const ConfigDocument& doc);

} // namespace ksr
