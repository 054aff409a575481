#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fusetrack/types.hpp"

namespace fusetrack {

// Shortest round-trip decimal for a double ("%.17g"); used by every writer so
// identical values always serialize to identical bytes.
std::string format_g17(double v);

// Writes content to a sibling temp file, then renames it over path.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// JSON-Lines codecs. One record per line, fields in a fixed order:
//   measurement {"t","track_id","source","kind","z","p_vis"}
//   gt          {"t","track_id","pos","visible"}
//   prediction  {"t","track_id","pos","cov_pos"}   (cov_pos row-major 2x2)
// Readers reject malformed lines, unknown fields, and (for gt/predictions)
// out-of-order timestamps within a track, reporting the line number.

std::string measurements_to_jsonl(const std::vector<SourcedMeasurement>& ms);
std::vector<SourcedMeasurement> measurements_from_jsonl(const std::string& text,
                                                        const std::string& origin);

std::string gt_to_jsonl(const std::vector<GroundTruthTrack>& tracks);
std::vector<GroundTruthTrack> gt_from_jsonl(const std::string& text, const std::string& origin);

std::string predictions_to_jsonl(const std::map<std::int64_t, std::vector<TrackOutput>>& preds);
std::map<std::int64_t, std::vector<TrackOutput>> predictions_from_jsonl(const std::string& text,
                                                                        const std::string& origin);

}  // namespace fusetrack
