#pragma once

#include <charconv>
#include <string>

namespace extnet {

// Shortest decimal representation that round-trips the double exactly
// (std::to_chars general format). Keeps every serialized artifact
// byte-stable across runs and platforms with IEEE doubles.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace extnet
