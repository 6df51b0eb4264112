#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>

namespace m2msim {

// All simulation time is kept in integer nanoseconds so that event ordering,
// ties and golden-file regressions are exact. Milliseconds appear only at the
// interface boundary (JSON, CSV, CLI flags).
using tick_t = std::int64_t;

inline constexpr tick_t kTicksPerMs = 1'000'000;
inline constexpr tick_t kNever = std::numeric_limits<tick_t>::max();
inline constexpr tick_t kPending = -1;
// Smallest representable increment; added to the deadline of a dropped packet
// so its latency strictly exceeds the deadline.
inline constexpr tick_t kEpsilonTick = 1;

inline tick_t ms_to_ticks(double ms) {
  return static_cast<tick_t>(std::llround(ms * static_cast<double>(kTicksPerMs)));
}

inline double ticks_to_ms(tick_t t) {
  return static_cast<double>(t) / static_cast<double>(kTicksPerMs);
}

// Fixed-point ms with 9 decimals (sub-ns digits always zero). Used by every
// CSV writer so identical inputs yield byte-identical files.
inline std::string format_ms(tick_t t) {
  const char* sign = "";
  if (t < 0) {
    sign = "-";
    t = -t;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%06lld000", sign,
                static_cast<long long>(t / kTicksPerMs),
                static_cast<long long>(t % kTicksPerMs));
  return buf;
}

// Exact for any value on the tick grid with |t| < 2^52 ns: the double rounding
// error is far below half a tick, so llround recovers the integer exactly.
inline tick_t parse_ms(const std::string& text, bool* ok = nullptr) {
  char* end = nullptr;
  const double ms = std::strtod(text.c_str(), &end);
  const bool good = end != text.c_str() && end != nullptr && *end == '\0' && std::isfinite(ms);
  if (ok != nullptr) *ok = good;
  return good ? ms_to_ticks(ms) : 0;
}

}  // namespace m2msim
