#include "acoustic/time_utils.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace acoustic::timeutil {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = static_cast<int>(y + (month <= 2));
}

namespace {

bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<unsigned>(c - '0');
  }
  out = value;
  return true;
}

constexpr std::array<unsigned, 13> kDaysInMonth{0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

bool is_leap(unsigned y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

bool valid_date(unsigned y, unsigned m, unsigned d) {
  if (m < 1 || m > 12 || d < 1) return false;
  unsigned max_d = kDaysInMonth[m];
  if (m == 2 && is_leap(y)) max_d = 29;
  return d <= max_d;
}

}  // namespace

std::optional<TimeMs> parse_iso8601(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS[.f{1,3}]Z
  if (s.size() < 20 || s.back() != 'Z') return std::nullopt;
  unsigned y, mo, d, h, mi, sec;
  if (!parse_uint(s, 0, 4, y) || s[4] != '-' || !parse_uint(s, 5, 2, mo) || s[7] != '-' ||
      !parse_uint(s, 8, 2, d) || s[10] != 'T' || !parse_uint(s, 11, 2, h) || s[13] != ':' ||
      !parse_uint(s, 14, 2, mi) || s[16] != ':' || !parse_uint(s, 17, 2, sec))
    return std::nullopt;
  if (!valid_date(y, mo, d) || h > 23 || mi > 59 || sec > 59) return std::nullopt;

  TimeMs ms = 0;
  if (s.size() > 20) {
    if (s[19] != '.') return std::nullopt;
    const std::size_t frac_len = s.size() - 21;  // digits between '.' and 'Z'
    if (frac_len < 1 || frac_len > 3) return std::nullopt;
    unsigned frac;
    if (!parse_uint(s, 20, frac_len, frac)) return std::nullopt;
    for (std::size_t i = frac_len; i < 3; ++i) frac *= 10;
    ms = frac;
  } else if (s.size() != 20) {
    return std::nullopt;
  }

  const std::int64_t days = days_from_civil(static_cast<int>(y), mo, d);
  return days * kMsPerDay + h * 3600 * kMsPerSecond + mi * kMsPerMinute + sec * kMsPerSecond + ms;
}

std::string format_iso8601(TimeMs t) {
  const TimeMs day = day_floor(t);
  TimeMs rem = t - day;
  int year;
  unsigned month, dom;
  civil_from_days(day / kMsPerDay, year, month, dom);
  const int ms = static_cast<int>(rem % 1000);
  rem /= 1000;
  const int sec = static_cast<int>(rem % 60);
  const int min = static_cast<int>((rem / 60) % 60);
  const int hour = static_cast<int>(rem / 3600);
  char buf[32];
  if (ms != 0)
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", year, month, dom, hour,
                  min, sec, ms);
  else
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", year, month, dom, hour, min,
                  sec);
  return buf;
}

std::string utc_date(TimeMs t) {
  int year;
  unsigned month, dom;
  civil_from_days(day_floor(t) / kMsPerDay, year, month, dom);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, dom);
  return buf;
}

std::optional<TimeMs> parse_utc_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  unsigned y, m, d;
  if (!parse_uint(s, 0, 4, y) || !parse_uint(s, 5, 2, m) || !parse_uint(s, 8, 2, d))
    return std::nullopt;
  if (!valid_date(y, m, d)) return std::nullopt;
  return days_from_civil(static_cast<int>(y), m, d) * kMsPerDay;
}

}  // namespace acoustic::timeutil
