#include "exportscope/time.hpp"

#include <cstdio>

namespace exportscope {

using namespace std::chrono;

Timestamp min_timestamp() {
  return time_point_cast<seconds>(sys_days{year{1} / January / 1});
}

Timestamp max_timestamp() {
  return time_point_cast<seconds>(sys_days{year{9999} / December / 31}) +
         seconds{kSecondsPerDay - 1};
}

bool in_document_range(Timestamp t) {
  return t >= min_timestamp() && t <= max_timestamp();
}

std::int64_t days_since_epoch(Timestamp t) {
  return floor<days>(t).time_since_epoch().count();
}

std::int64_t seconds_of_day(Timestamp t) {
  return (t - floor<days>(t)).count();
}

std::string format_rfc3339(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<Timestamp> parse_rfc3339_utc(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20) return std::nullopt;
  int y, mo, d, h, mi, s;
  if (!read_digits(text, 0, 4, y) || text[4] != '-' || !read_digits(text, 5, 2, mo) ||
      text[7] != '-' || !read_digits(text, 8, 2, d) || text[10] != 'T' ||
      !read_digits(text, 11, 2, h) || text[13] != ':' || !read_digits(text, 14, 2, mi) ||
      text[16] != ':' || !read_digits(text, 17, 2, s) || text[19] != 'Z') {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (y < 1 || !ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return time_point_cast<seconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{s};
}

}  // namespace exportscope
