#include "tde/timeparse.hpp"

#include <array>
#include <cstdio>

namespace tde {

// Howard Hinnant's civil-from-days algorithms.
i64 days_from_civil(i64 y, unsigned m, unsigned d) {
  y -= m <= 2;
  const i64 era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = unsigned(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + i64(doe) - 719468;
}

void civil_from_days(i64 z, i64& y, unsigned& m, unsigned& d) {
  z += 719468;
  const i64 era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = unsigned(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = i64(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += (m <= 2);
}

static bool read_int(const std::string& s, size_t pos, size_t len, i64& out) {
  if (pos + len > s.size())
    return false;
  i64 v = 0;
  for (size_t i = 0; i < len; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9')
      return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

i64 parse_iso8601(const std::string& s) {
  i64 y, mo, d;
  if (!read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
      !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d))
    throw FormatError("bad timestamp: " + s);
  i64 h = 0, mi = 0, sec = 0;
  if (s.size() > 10) {
    if ((s[10] != 'T' && s[10] != ' ') || s.size() < 19 || s[13] != ':' ||
        s[16] != ':' || !read_int(s, 11, 2, h) || !read_int(s, 14, 2, mi) ||
        !read_int(s, 17, 2, sec))
      throw FormatError("bad timestamp: " + s);
    if (s.size() > 19 && !(s.size() == 20 && s[19] == 'Z'))
      throw FormatError("bad timestamp suffix: " + s);
  }
  return days_from_civil(y, unsigned(mo), unsigned(d)) * 86400 + h * 3600 +
         mi * 60 + sec;
}

static void split_epoch(i64 epoch_s, i64& y, unsigned& m, unsigned& d, int& hh,
                        int& mm, int& ss) {
  i64 days = epoch_s / 86400;
  i64 rem = epoch_s - days * 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  civil_from_days(days, y, m, d);
  hh = int(rem / 3600);
  mm = int((rem % 3600) / 60);
  ss = int(rem % 60);
}

std::string format_iso8601(i64 epoch_s) {
  i64 y;
  unsigned m, d;
  int hh, mm, ss;
  split_epoch(epoch_s, y, m, d, hh, mm, ss);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                (long long)y, m, d, hh, mm, ss);
  return buf;
}

std::string format_date(i64 epoch_s) {
  i64 y;
  unsigned m, d;
  int hh, mm, ss;
  split_epoch(epoch_s, y, m, d, hh, mm, ss);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", (long long)y, m, d);
  return buf;
}

std::string format_hhmm(i64 epoch_s) {
  i64 y;
  unsigned m, d;
  int hh, mm, ss;
  split_epoch(epoch_s, y, m, d, hh, mm, ss);
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", hh, mm);
  return buf;
}

std::string day_of_week_name(i64 epoch_s) {
  static const std::array<const char*, 7> names = {
      "Thursday", "Friday", "Saturday", "Sunday", "Monday", "Tuesday",
      "Wednesday"}; // epoch day 0 = Thursday
  i64 days = epoch_s / 86400;
  if (epoch_s < 0 && epoch_s % 86400 != 0)
    days -= 1;
  i64 idx = days % 7;
  if (idx < 0)
    idx += 7;
  return names[size_t(idx)];
}

} // namespace tde
