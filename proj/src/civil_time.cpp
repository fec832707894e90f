#include "delaytree/civil_time.hpp"

#include <charconv>
#include <cstdio>

namespace delaytree {

namespace {

std::optional<int> fixed_digits(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) return std::nullopt;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

}  // namespace

std::chrono::sys_days CivilDate::days() const {
  using namespace std::chrono;
  return sys_days{year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                 std::chrono::day{static_cast<unsigned>(day)}}};
}

CivilDate CivilDate::from_days(std::chrono::sys_days days) {
  std::chrono::year_month_day ymd{days};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day()))};
}

CivilDate CivilDate::plus_days(int n) const { return from_days(days() + std::chrono::days{n}); }

bool CivilDate::is_weekend() const {
  std::chrono::weekday wd{days()};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

std::int64_t CivilTime::minutes() const {
  std::int64_t day_count = date.days().time_since_epoch().count();
  return day_count * 1440 + hour * 60 + minute;
}

CivilTime CivilTime::from_minutes(std::int64_t minutes) {
  std::int64_t day_count = minutes / 1440;
  std::int64_t rem = minutes % 1440;
  if (rem < 0) {
    rem += 1440;
    --day_count;
  }
  CivilDate date = CivilDate::from_days(std::chrono::sys_days{std::chrono::days{day_count}});
  return {date, static_cast<int>(rem / 60), static_cast<int>(rem % 60)};
}

std::optional<CivilDate> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = fixed_digits(text, 0, 4);
  auto m = fixed_digits(text, 5, 2);
  auto d = fixed_digits(text, 8, 2);
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return CivilDate{*y, *m, *d};
}

std::optional<CivilTime> parse_civil_time(std::string_view text) {
  if (text.size() != 16 || text[10] != 'T' || text[13] != ':') return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  auto h = fixed_digits(text, 11, 2);
  auto m = fixed_digits(text, 14, 2);
  if (!date || !h || !m || *h > 23 || *m > 59) return std::nullopt;
  return CivilTime{*date, *h, *m};
}

std::string format_date(CivilDate date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", date.year, date.month, date.day);
  return buf;
}

std::string format_civil_time(CivilTime time) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d", time.date.year, time.date.month, time.date.day,
                time.hour, time.minute);
  return buf;
}

}  // namespace delaytree
