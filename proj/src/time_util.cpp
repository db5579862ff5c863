// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/time_util.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace blogflux {
namespace {

using namespace std::chrono;

constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                      "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{} && ptr == text.data() + pos + len;
}

std::optional<Timestamp> compose(int y, int mo, int d, int h, int mi, int s) {
  if (mo < 1 || mo > 12 || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return make_utc(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Timestamp make_utc(int y, unsigned mo, unsigned d, int h, int mi, int s) {
  const sys_days days{year{y} / month{mo} / day{d}};
  return static_cast<Timestamp>(days.time_since_epoch().count()) * 86400 +
         h * kSecondsPerHour + mi * 60 + s;
}

std::optional<Timestamp> parse_iso8601(std::string_view t) {
  int y, mo, d, h, mi, s;
  if (t.size() < 20) return std::nullopt;
  if (!read_int(t, 0, 4, y) || t[4] != '-' || !read_int(t, 5, 2, mo) || t[7] != '-' ||
      !read_int(t, 8, 2, d) || (t[10] != 'T' && t[10] != ' ') || !read_int(t, 11, 2, h) ||
      t[13] != ':' || !read_int(t, 14, 2, mi) || t[16] != ':' || !read_int(t, 17, 2, s)) {
    return std::nullopt;
  }
  auto base = compose(y, mo, d, h, mi, s);
  if (!base) return std::nullopt;
  std::string_view zone = t.substr(19);
  if (zone == "Z") return base;
  if (zone.size() != 6 || (zone[0] != '+' && zone[0] != '-') || zone[3] != ':') {
    return std::nullopt;
  }
  int oh, om;
  if (!read_int(zone, 1, 2, oh) || !read_int(zone, 4, 2, om)) return std::nullopt;
  const std::int64_t offset = (oh * 60 + om) * 60;
  return zone[0] == '+' ? *base - offset : *base + offset;
}

std::string format_iso8601(Timestamp ts) {
  const std::int64_t days = floor_div(ts, 86400);
  const std::int64_t rem = ts - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::optional<Timestamp> parse_apache_time(std::string_view t) {
  // 01/Sep/2008:10:30:00 +0000
  if (t.size() != 26) return std::nullopt;
  int d, y, h, mi, s, oh, om;
  if (!read_int(t, 0, 2, d) || t[2] != '/' || t[6] != '/' || !read_int(t, 7, 4, y) ||
      t[11] != ':' || !read_int(t, 12, 2, h) || t[14] != ':' || !read_int(t, 15, 2, mi) ||
      t[17] != ':' || !read_int(t, 18, 2, s) || t[20] != ' ' ||
      (t[21] != '+' && t[21] != '-') || !read_int(t, 22, 2, oh) || !read_int(t, 24, 2, om)) {
    return std::nullopt;
  }
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (t.substr(3, 3) == kMonths[i]) mo = static_cast<int>(i) + 1;
  }
  auto base = compose(y, mo, d, h, mi, s);
  if (!base) return std::nullopt;
  const std::int64_t offset = (oh * 60 + om) * 60;
  return t[21] == '+' ? *base - offset : *base + offset;
}

std::string format_apache_time(Timestamp ts) {
  const std::int64_t days = floor_div(ts, 86400);
  const std::int64_t rem = ts - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%02u/%s/%04d:%02d:%02d:%02d +0000",
                static_cast<unsigned>(ymd.day()),
                std::string(kMonths[static_cast<unsigned>(ymd.month()) - 1]).c_str(),
                static_cast<int>(ymd.year()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

int local_hour(Timestamp ts, int offset_hours) {
  const Timestamp local = ts + offset_hours * kSecondsPerHour;
  return static_cast<int>(floor_div(local, kSecondsPerHour) - floor_div(local, 86400) * 24);
}

int local_weekday(Timestamp ts, int offset_hours) {
  const Timestamp local = ts + offset_hours * kSecondsPerHour;
  const std::int64_t days = floor_div(local, 86400);
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days % 7) + 7 + 4) % 7);
}

}  // namespace blogflux
