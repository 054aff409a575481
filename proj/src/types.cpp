#include "fusetrack/types.hpp"

#include <string>

namespace fusetrack {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::out_of_order: return "out_of_order";
    case Errc::singular: return "singular";
    case Errc::parse: return "parse";
    case Errc::io: return "io";
    case Errc::unknown_track: return "unknown_track";
    case Errc::internal: return "internal";
  }
  return "?";
}

const char* source_name(Source s) { return s == Source::event ? "event" : "frame"; }

const char* kind_name(MeasKind k) { return k == MeasKind::absolute ? "absolute" : "relative"; }

Source source_from_name(const std::string& s) {
  if (s == "event") return Source::event;
  if (s == "frame") return Source::frame;
  fail(Errc::parse, "unknown source '" + s + "'");
}

MeasKind kind_from_name(const std::string& s) {
  if (s == "absolute") return MeasKind::absolute;
  if (s == "relative") return MeasKind::relative;
  fail(Errc::parse, "unknown measurement kind '" + s + "'");
}

}  // namespace fusetrack
