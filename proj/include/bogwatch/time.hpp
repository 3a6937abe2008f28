#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <string_view>

namespace bogwatch {

using UtcTime = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (also accepts a space separator and a
/// missing trailing Z). Throws DataError on malformed input.
UtcTime parse_utc(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(UtcTime t);

inline double seconds_between(UtcTime from, UtcTime to) {
  return static_cast<double>((to - from).count());
}

inline UtcTime add_seconds(UtcTime t, double seconds) {
  return t + std::chrono::seconds(static_cast<long long>(std::llround(seconds)));
}

/// Julian date of a UTC instant (no Delta-T).
double julian_date(UtcTime t);

}  // namespace bogwatch
