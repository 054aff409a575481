#pragma once

#include <stdexcept>
#include <string>

namespace fusetrack {

// Stable error categories, mirrored one-to-one by the C API status codes.
enum class Errc : int {
  invalid_argument = 1,
  out_of_order = 2,
  singular = 3,
  parse = 4,
  io = 5,
  unknown_track = 6,
  internal = 7,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace fusetrack
