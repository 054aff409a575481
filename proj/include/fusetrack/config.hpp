#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fusetrack/fusion.hpp"
#include "fusetrack/metrics.hpp"
#include "fusetrack/scenario.hpp"

namespace fusetrack {

// Flat key=value configuration: one dotted lowercase key per line, '#' for
// full-line comments. Duplicate keys within one source are errors; overrides
// replace. Unknown keys are rejected against a per-command schema, with the
// offending line reported.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    std::string origin;
  };

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin);

  // Applies newline-separated key=value pairs on top of the current entries.
  void merge_overrides(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  std::int64_t get_i64(const std::string& key, std::int64_t def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::string require_string(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key, std::vector<double> def) const;

  // Fails with Errc::parse when an entry's key is not in `known`.
  void check_known(const std::set<std::string>& known) const;

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  void ingest_line(const std::string& line, int line_no, const std::string& origin, bool replace);
  [[noreturn]] void bad_value(const std::string& key, const std::string& why) const;

  std::map<std::string, Entry> entries_;
};

// Schemas, shared by configuration loading and the echo writer.
const std::set<std::string>& scenario_config_keys();
const std::set<std::string>& run_config_keys();
const std::set<std::string>& eval_config_keys();

ScenarioSpec scenario_from_config(const Config& cfg);

// Canonical echo of a scenario: every key in schema order, values printed
// with full round-trip precision, so re-parsing regenerates byte-identical
// outputs.
std::string scenario_to_config_text(const ScenarioSpec& spec);

// Everything cmd-level tracking needs beyond the measurement stream.
struct RunParams {
  FusionMode mode = FusionMode::kalman_fused;
  ProcessModel pm;
  NoiseMaps maps;
  double init_pos_var = 1.0;
  double init_vel_var = 100.0;
  OooPolicy ooo_policy = OooPolicy::reject;
  double ooo_window = 0.0;
  std::string gt_path;  // initial positions and, later, evaluation targets
};

RunParams run_from_config(const Config& cfg);
EvalConfig eval_from_config(const Config& cfg);

}  // namespace fusetrack
