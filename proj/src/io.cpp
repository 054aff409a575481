#include "fusetrack/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fusetrack {

using nlohmann::json;

std::string format_g17(double v) {
  if (!std::isfinite(v)) fail(Errc::invalid_argument, "cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) fail(Errc::io, "write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(Errc::io, "cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

void append_pair(std::string& out, const Vec2& v) {
  out += '[';
  out += format_g17(v.x());
  out += ',';
  out += format_g17(v.y());
  out += ']';
}

[[noreturn]] void line_fail(const std::string& origin, std::size_t line_no,
                            const std::string& why) {
  fail(Errc::parse, origin + ":" + std::to_string(line_no) + ": " + why);
}

json parse_line(const std::string& line, const std::string& origin, std::size_t line_no,
                std::size_t expect_fields) {
  json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) line_fail(origin, line_no, "not a JSON object");
  if (rec.size() != expect_fields) {
    line_fail(origin, line_no, "expected exactly " + std::to_string(expect_fields) + " fields");
  }
  return rec;
}

double get_num(const json& rec, const char* key, const std::string& origin, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number()) {
    line_fail(origin, line_no, std::string("missing numeric field '") + key + "'");
  }
  return it->get<double>();
}

std::int64_t get_id(const json& rec, const std::string& origin, std::size_t line_no) {
  auto it = rec.find("track_id");
  if (it == rec.end() || !it->is_number_integer()) {
    line_fail(origin, line_no, "missing integer field 'track_id'");
  }
  return it->get<std::int64_t>();
}

std::string get_str(const json& rec, const char* key, const std::string& origin,
                    std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) {
    line_fail(origin, line_no, std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

Vec2 get_vec2(const json& rec, const char* key, const std::string& origin, std::size_t line_no) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number()) {
    line_fail(origin, line_no, std::string("field '") + key + "' must be [x, y]");
  }
  return Vec2((*it)[0].get<double>(), (*it)[1].get<double>());
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    if (end > start) fn(text.substr(start, end - start), line_no);
    start = end + 1;
  }
}

}  // namespace

std::string measurements_to_jsonl(const std::vector<SourcedMeasurement>& ms) {
  std::string out;
  for (const auto& m : ms) {
    out += R"({"t":)" + format_g17(m.t);
    out += R"(,"track_id":)" + std::to_string(m.track_id);
    out += R"(,"source":")" + std::string(source_name(m.source)) + '"';
    out += R"(,"kind":")" + std::string(kind_name(m.kind)) + '"';
    out += R"(,"z":)";
    append_pair(out, m.z_raw);
    out += R"(,"p_vis":)" + format_g17(m.report.p_vis);
    out += "}\n";
  }
  return out;
}

std::vector<SourcedMeasurement> measurements_from_jsonl(const std::string& text,
                                                        const std::string& origin) {
  std::vector<SourcedMeasurement> out;
  for_each_line(text, [&](const std::string& line, std::size_t line_no) {
    const json rec = parse_line(line, origin, line_no, 6);
    SourcedMeasurement m;
    m.t = get_num(rec, "t", origin, line_no);
    if (!std::isfinite(m.t)) line_fail(origin, line_no, "t must be finite");
    m.track_id = get_id(rec, origin, line_no);
    m.source = source_from_name(get_str(rec, "source", origin, line_no));
    m.kind = kind_from_name(get_str(rec, "kind", origin, line_no));
    if (m.kind == MeasKind::relative && m.source != Source::event) {
      line_fail(origin, line_no, "relative measurements must come from the event source");
    }
    m.z_raw = get_vec2(rec, "z", origin, line_no);
    const double p_vis = get_num(rec, "p_vis", origin, line_no);
    m.report.p_vis = p_vis;
    m.report.p_occ = 1.0 - p_vis;
    try {
      m.report.validate();
    } catch (const Error& e) {
      line_fail(origin, line_no, e.what());
    }
    out.push_back(m);
  });
  return out;
}

std::string gt_to_jsonl(const std::vector<GroundTruthTrack>& tracks) {
  std::string out;
  for (const auto& track : tracks) {
    for (const auto& s : track.samples) {
      out += R"({"t":)" + format_g17(s.t);
      out += R"(,"track_id":)" + std::to_string(track.track_id);
      out += R"(,"pos":)";
      append_pair(out, s.pos);
      out += R"(,"visible":)";
      out += s.visible ? "true" : "false";
      out += "}\n";
    }
  }
  return out;
}

std::vector<GroundTruthTrack> gt_from_jsonl(const std::string& text, const std::string& origin) {
  std::map<std::int64_t, GroundTruthTrack> by_id;
  for_each_line(text, [&](const std::string& line, std::size_t line_no) {
    const json rec = parse_line(line, origin, line_no, 4);
    GroundTruthSample s;
    s.t = get_num(rec, "t", origin, line_no);
    const std::int64_t id = get_id(rec, origin, line_no);
    s.pos = get_vec2(rec, "pos", origin, line_no);
    auto it = rec.find("visible");
    if (it == rec.end() || !it->is_boolean()) {
      line_fail(origin, line_no, "missing boolean field 'visible'");
    }
    s.visible = it->get<bool>();
    auto& track = by_id[id];
    track.track_id = id;
    if (!track.samples.empty() && s.t <= track.samples.back().t) {
      line_fail(origin, line_no, "gt timestamps must be strictly increasing per track");
    }
    track.samples.push_back(s);
  });
  std::vector<GroundTruthTrack> out;
  out.reserve(by_id.size());
  for (auto& [id, track] : by_id) out.push_back(std::move(track));
  return out;
}

std::string predictions_to_jsonl(const std::map<std::int64_t, std::vector<TrackOutput>>& preds) {
  std::string out;
  for (const auto& [id, outputs] : preds) {
    for (const auto& o : outputs) {
      out += R"({"t":)" + format_g17(o.t);
      out += R"(,"track_id":)" + std::to_string(id);
      out += R"(,"pos":)";
      append_pair(out, o.pos);
      out += R"(,"cov_pos":[)";
      out += format_g17(o.cov_pos(0, 0)) + ',' + format_g17(o.cov_pos(0, 1)) + ',' +
             format_g17(o.cov_pos(1, 0)) + ',' + format_g17(o.cov_pos(1, 1));
      out += "]}\n";
    }
  }
  return out;
}

std::map<std::int64_t, std::vector<TrackOutput>> predictions_from_jsonl(
    const std::string& text, const std::string& origin) {
  std::map<std::int64_t, std::vector<TrackOutput>> out;
  for_each_line(text, [&](const std::string& line, std::size_t line_no) {
    const json rec = parse_line(line, origin, line_no, 4);
    TrackOutput o;
    o.t = get_num(rec, "t", origin, line_no);
    const std::int64_t id = get_id(rec, origin, line_no);
    o.pos = get_vec2(rec, "pos", origin, line_no);
    auto it = rec.find("cov_pos");
    if (it == rec.end() || !it->is_array() || it->size() != 4) {
      line_fail(origin, line_no, "field 'cov_pos' must have 4 entries");
    }
    for (int i = 0; i < 4; ++i) {
      if (!(*it)[i].is_number()) line_fail(origin, line_no, "cov_pos entries must be numbers");
      o.cov_pos(i / 2, i % 2) = (*it)[i].get<double>();
    }
    auto& list = out[id];
    if (!list.empty() && o.t < list.back().t) {
      line_fail(origin, line_no, "prediction timestamps must be nondecreasing per track");
    }
    list.push_back(o);
  });
  return out;
}

}  // namespace fusetrack
