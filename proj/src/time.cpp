#include "bogwatch/time.hpp"

#include <cstdio>

#include "bogwatch/error.hpp"

namespace bogwatch {

UtcTime parse_utc(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  const std::string buf(text);
  int consumed = 0;
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &s,
                  &consumed) != 7 ||
      (sep != 'T' && sep != ' ')) {
    throw DataError("malformed UTC timestamp '" + buf + "'");
  }
  const std::string_view rest = text.substr(static_cast<std::size_t>(consumed));
  if (!(rest.empty() || rest == "Z")) throw DataError("malformed UTC timestamp '" + buf + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60 || h < 0 || mi < 0 || s < 0) {
    throw DataError("invalid calendar value in '" + buf + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_utc(UtcTime t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long long>(hms.hours().count()),
                static_cast<long long>(hms.minutes().count()),
                static_cast<long long>(hms.seconds().count()));
  return buf;
}

double julian_date(UtcTime t) {
  return static_cast<double>(t.time_since_epoch().count()) / 86400.0 + 2440587.5;
}

}  // namespace bogwatch
