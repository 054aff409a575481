#include "fusetrack/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fusetrack/io.hpp"

namespace fusetrack {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  for (char c : key) {
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
          c == '.' || c == '_')) {
      return false;
    }
  }
  return true;
}

}  // namespace

void Config::ingest_line(const std::string& raw, int line_no, const std::string& origin,
                         bool replace) {
  const std::string line = trim(raw);
  if (line.empty() || line.front() == '#') return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    fail(Errc::parse, origin + ":" + std::to_string(line_no) + ": expected key=value");
  }
  const std::string key = trim(line.substr(0, eq));
  const std::string value = trim(line.substr(eq + 1));
  if (!valid_key(key)) {
    fail(Errc::parse, origin + ":" + std::to_string(line_no) + ": bad key '" + key + "'");
  }
  Entry entry{value, line_no, origin};
  auto [it, inserted] = entries_.emplace(key, entry);
  if (!inserted) {
    if (!replace && it->second.origin == origin) {
      fail(Errc::parse, origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                            "' (first at line " + std::to_string(it->second.line) + ")");
    }
    it->second = entry;
  }
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) cfg.ingest_line(line, ++line_no, origin, false);
  return cfg;
}

void Config::merge_overrides(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) ingest_line(line, ++line_no, "<override>", true);
}

void Config::bad_value(const std::string& key, const std::string& why) const {
  const auto& e = entries_.at(key);
  fail(Errc::parse,
       e.origin + ":" + std::to_string(e.line) + ": key '" + key + "': " + why);
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? def : it->second.value;
}

std::string Config::require_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) fail(Errc::parse, "missing required config key '" + key + "'");
  return it->second.value;
}

double Config::get_double(const std::string& key, double def) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  const std::string& v = it->second.value;
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE) {
    bad_value(key, "not a number: '" + v + "'");
  }
  return x;
}

std::int64_t Config::get_i64(const std::string& key, std::int64_t def) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  const std::string& v = it->second.value;
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE) {
    bad_value(key, "not an integer: '" + v + "'");
  }
  return x;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t def) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  const std::string& v = it->second.value;
  if (!v.empty() && v.front() == '-') bad_value(key, "must be nonnegative");
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || v.empty() || errno == ERANGE) {
    bad_value(key, "not an unsigned integer: '" + v + "'");
  }
  return x;
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  const std::string& v = it->second.value;
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, "not a boolean: '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            std::vector<double> def) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return def;
  std::vector<double> out;
  std::stringstream ss(it->second.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string v = trim(item);
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
      bad_value(key, "not a comma-separated number list");
    }
    out.push_back(x);
  }
  if (out.empty()) bad_value(key, "empty list");
  return out;
}

void Config::check_known(const std::set<std::string>& known) const {
  for (const auto& [key, entry] : entries_) {
    if (known.count(key) == 0) {
      fail(Errc::parse, entry.origin + ":" + std::to_string(entry.line) + ": unknown key '" +
                            key + "'");
    }
  }
}

namespace {

std::set<std::string> make_scenario_keys() {
  std::set<std::string> keys{
      "seed",
      "scenario.duration_s",
      "scenario.master_rate_hz",
      "scenario.n_tracks",
      "scenario.arena_w",
      "scenario.arena_h",
      "motion.max_speed",
      "motion.accel_std",
      "motion.accel_segment_s",
      "motion.steer_gain",
      "occluder.size_min",
      "occluder.size_max",
      "occluder.coverage_min",
      "occluder.coverage_max",
      "occluder.window_min_s",
      "occluder.window_max_s",
      "occluder.margin_min",
      "occluder.margin_max",
      "occluder.moving_frac",
      "occluder.max_attempts",
  };
  for (const char* src : {"event", "frame"}) {
    const std::string p = std::string("source.") + src + ".";
    keys.insert(p + "rate_hz");
    keys.insert(p + "noise_std");
    keys.insert(p + "drift_std");
    keys.insert(p + "behavior");
    keys.insert(p + "garbage_radius");
    keys.insert(p + "vis_flip_prob");
  }
  return keys;
}

std::set<std::string> make_run_keys() {
  return {
      "mode",
      "process.q_pos",
      "process.q_vel",
      "noise.event.sigma2_min",
      "noise.event.sigma2_max",
      "noise.frame.sigma2_min",
      "noise.frame.sigma2_max",
      "tracker.init_pos_var",
      "tracker.init_vel_var",
      "tracker.ooo_policy",
      "tracker.ooo_window",
      "paths.gt",
  };
}

std::set<std::string> make_eval_keys() {
  return {"eval.fa_dist_threshold", "eval.delta_thresholds", "eval.stable_min_age"};
}

SourceModel source_from_config(const Config& cfg, Source which) {
  SourceModel model = which == Source::event ? default_event_model() : default_frame_model();
  const std::string p = std::string("source.") + source_name(which) + ".";
  model.rate_hz = cfg.get_double(p + "rate_hz", model.rate_hz);
  model.noise_std = cfg.get_double(p + "noise_std", model.noise_std);
  model.drift_std = cfg.get_double(p + "drift_std", model.drift_std);
  model.behavior = occluded_behavior_from_name(
      cfg.get_string(p + "behavior", occluded_behavior_name(model.behavior)));
  model.garbage_radius = cfg.get_double(p + "garbage_radius", model.garbage_radius);
  model.vis_flip_prob = cfg.get_double(p + "vis_flip_prob", model.vis_flip_prob);
  return model;
}

}  // namespace

const std::set<std::string>& scenario_config_keys() {
  static const std::set<std::string> keys = make_scenario_keys();
  return keys;
}

const std::set<std::string>& run_config_keys() {
  static const std::set<std::string> keys = make_run_keys();
  return keys;
}

const std::set<std::string>& eval_config_keys() {
  static const std::set<std::string> keys = make_eval_keys();
  return keys;
}

ScenarioSpec scenario_from_config(const Config& cfg) {
  ScenarioSpec spec;
  spec.seed = cfg.get_u64("seed", spec.seed);
  spec.duration_s = cfg.get_double("scenario.duration_s", spec.duration_s);
  spec.master_rate_hz = cfg.get_double("scenario.master_rate_hz", spec.master_rate_hz);
  spec.n_tracks = static_cast<int>(cfg.get_i64("scenario.n_tracks", spec.n_tracks));
  spec.arena_w = cfg.get_double("scenario.arena_w", spec.arena_w);
  spec.arena_h = cfg.get_double("scenario.arena_h", spec.arena_h);
  spec.motion.max_speed = cfg.get_double("motion.max_speed", spec.motion.max_speed);
  spec.motion.accel_std = cfg.get_double("motion.accel_std", spec.motion.accel_std);
  spec.motion.accel_segment_s = cfg.get_double("motion.accel_segment_s", spec.motion.accel_segment_s);
  spec.motion.steer_gain = cfg.get_double("motion.steer_gain", spec.motion.steer_gain);
  spec.occluder.size_min = cfg.get_double("occluder.size_min", spec.occluder.size_min);
  spec.occluder.size_max = cfg.get_double("occluder.size_max", spec.occluder.size_max);
  spec.occluder.coverage_min = cfg.get_double("occluder.coverage_min", spec.occluder.coverage_min);
  spec.occluder.coverage_max = cfg.get_double("occluder.coverage_max", spec.occluder.coverage_max);
  spec.occluder.window_min_s = cfg.get_double("occluder.window_min_s", spec.occluder.window_min_s);
  spec.occluder.window_max_s = cfg.get_double("occluder.window_max_s", spec.occluder.window_max_s);
  spec.occluder.margin_min = cfg.get_double("occluder.margin_min", spec.occluder.margin_min);
  spec.occluder.margin_max = cfg.get_double("occluder.margin_max", spec.occluder.margin_max);
  spec.occluder.moving_frac = cfg.get_double("occluder.moving_frac", spec.occluder.moving_frac);
  spec.occluder.max_attempts =
      static_cast<int>(cfg.get_i64("occluder.max_attempts", spec.occluder.max_attempts));
  spec.event_source = source_from_config(cfg, Source::event);
  spec.frame_source = source_from_config(cfg, Source::frame);
  spec.validate();
  return spec;
}

std::string scenario_to_config_text(const ScenarioSpec& spec) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  auto putd = [&put](const std::string& key, double v) { put(key, format_g17(v)); };
  put("seed", std::to_string(spec.seed));
  putd("scenario.duration_s", spec.duration_s);
  putd("scenario.master_rate_hz", spec.master_rate_hz);
  put("scenario.n_tracks", std::to_string(spec.n_tracks));
  putd("scenario.arena_w", spec.arena_w);
  putd("scenario.arena_h", spec.arena_h);
  putd("motion.max_speed", spec.motion.max_speed);
  putd("motion.accel_std", spec.motion.accel_std);
  putd("motion.accel_segment_s", spec.motion.accel_segment_s);
  putd("motion.steer_gain", spec.motion.steer_gain);
  putd("occluder.size_min", spec.occluder.size_min);
  putd("occluder.size_max", spec.occluder.size_max);
  putd("occluder.coverage_min", spec.occluder.coverage_min);
  putd("occluder.coverage_max", spec.occluder.coverage_max);
  putd("occluder.window_min_s", spec.occluder.window_min_s);
  putd("occluder.window_max_s", spec.occluder.window_max_s);
  putd("occluder.margin_min", spec.occluder.margin_min);
  putd("occluder.margin_max", spec.occluder.margin_max);
  putd("occluder.moving_frac", spec.occluder.moving_frac);
  put("occluder.max_attempts", std::to_string(spec.occluder.max_attempts));
  for (const auto* model : {&spec.event_source, &spec.frame_source}) {
    const std::string p = std::string("source.") + source_name(model->source) + ".";
    putd(p + "rate_hz", model->rate_hz);
    putd(p + "noise_std", model->noise_std);
    putd(p + "drift_std", model->drift_std);
    put(p + "behavior", occluded_behavior_name(model->behavior));
    putd(p + "garbage_radius", model->garbage_radius);
    putd(p + "vis_flip_prob", model->vis_flip_prob);
  }
  return out;
}

RunParams run_from_config(const Config& cfg) {
  RunParams rp;
  rp.mode = fusion_mode_from_name(cfg.get_string("mode", fusion_mode_name(rp.mode)));
  rp.pm.q_pos = cfg.get_double("process.q_pos", rp.pm.q_pos);
  rp.pm.q_vel = cfg.get_double("process.q_vel", 3000.0);
  rp.maps.event.sigma2_min = cfg.get_double("noise.event.sigma2_min", 0.4);
  rp.maps.event.sigma2_max = cfg.get_double("noise.event.sigma2_max", 1.0e4);
  rp.maps.frame.sigma2_min = cfg.get_double("noise.frame.sigma2_min", 0.49);
  rp.maps.frame.sigma2_max = cfg.get_double("noise.frame.sigma2_max", 1.0e4);
  rp.init_pos_var = cfg.get_double("tracker.init_pos_var", rp.init_pos_var);
  rp.init_vel_var = cfg.get_double("tracker.init_vel_var", rp.init_vel_var);
  const std::string policy = cfg.get_string("tracker.ooo_policy", "reject");
  if (policy == "reject") {
    rp.ooo_policy = OooPolicy::reject;
  } else if (policy == "buffer") {
    rp.ooo_policy = OooPolicy::buffer;
  } else {
    fail(Errc::parse, "tracker.ooo_policy must be 'reject' or 'buffer', got '" + policy + "'");
  }
  rp.ooo_window = cfg.get_double("tracker.ooo_window", rp.ooo_window);
  rp.gt_path = cfg.get_string("paths.gt", "");
  rp.maps.event.validate();
  rp.maps.frame.validate();
  return rp;
}

EvalConfig eval_from_config(const Config& cfg) {
  EvalConfig ec;
  ec.fa_dist_threshold = cfg.get_double("eval.fa_dist_threshold", ec.fa_dist_threshold);
  ec.delta_thresholds = cfg.get_double_list("eval.delta_thresholds", ec.delta_thresholds);
  ec.stable_min_age = cfg.get_double("eval.stable_min_age", ec.stable_min_age);
  ec.validate();
  return ec;
}

}  // namespace fusetrack
