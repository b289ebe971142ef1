#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace acoustic::timeutil {

// All timestamps are UTC milliseconds since the Unix epoch.
using TimeMs = std::int64_t;

inline constexpr TimeMs kMsPerSecond = 1000;
inline constexpr TimeMs kMsPerMinute = 60 * kMsPerSecond;
inline constexpr TimeMs kMsPerWindow = 5 * kMsPerMinute;
inline constexpr TimeMs kMsPerDay = 24 * 60 * kMsPerMinute;
inline constexpr int kWindowsPerDay = 288;

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

// Strict ISO 8601 UTC: "YYYY-MM-DDTHH:MM:SSZ" or "YYYY-MM-DDTHH:MM:SS.mmmZ"
// (1 to 3 fractional digits). Returns nullopt on any malformation.
std::optional<TimeMs> parse_iso8601(std::string_view text);

// Inverse of parse_iso8601; emits ".mmm" only when the value has a
// sub-second component, so canonical strings round-trip byte-exactly.
std::string format_iso8601(TimeMs t);

// "YYYY-MM-DD" of the UTC day containing t.
std::string utc_date(TimeMs t);

// Midnight (UTC) of "YYYY-MM-DD"; nullopt on malformed input.
std::optional<TimeMs> parse_utc_date(std::string_view date);

inline TimeMs window_floor(TimeMs t) {
  // Safe for the sensor-era timestamps we handle (t >= 0), and still exact
  // for negative inputs.
  TimeMs q = t / kMsPerWindow;
  if (t % kMsPerWindow != 0 && t < 0) --q;
  return q * kMsPerWindow;
}

inline TimeMs day_floor(TimeMs t) {
  TimeMs q = t / kMsPerDay;
  if (t % kMsPerDay != 0 && t < 0) --q;
  return q * kMsPerDay;
}

// Slot index 0..287 of a window start within its UTC day.
inline int slot_in_day(TimeMs window_start) {
  return static_cast<int>((window_start - day_floor(window_start)) / kMsPerWindow);
}

}  // namespace acoustic::timeutil
