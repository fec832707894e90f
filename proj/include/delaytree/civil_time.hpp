#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace delaytree {

// Naive local calendar date. No time zone is attached or implied.
struct CivilDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  friend auto operator<=>(const CivilDate&, const CivilDate&) = default;

  std::chrono::sys_days days() const;
  static CivilDate from_days(std::chrono::sys_days days);

  CivilDate plus_days(int n) const;
  bool is_weekend() const;
};

// Naive local date and time at minute resolution.
struct CivilTime {
  CivilDate date;
  int hour = 0;
  int minute = 0;

  friend auto operator<=>(const CivilTime&, const CivilTime&) = default;

  // Minutes since 1970-01-01T00:00 on the same naive clock.
  std::int64_t minutes() const;
  static CivilTime from_minutes(std::int64_t minutes);

  CivilTime floor_hour() const { return {date, hour, 0}; }
};

// Strict `YYYY-MM-DD`; returns nullopt for anything else, including
// impossible dates such as 2017-02-30.
std::optional<CivilDate> parse_date(std::string_view text);

// Strict `YYYY-MM-DDTHH:MM`.
std::optional<CivilTime> parse_civil_time(std::string_view text);

std::string format_date(CivilDate date);
std::string format_civil_time(CivilTime time);

}  // namespace delaytree
