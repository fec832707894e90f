#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delaytree/civil_time.hpp"
#include "delaytree/types.hpp"

namespace delaytree {

// Hours retained by the pipeline, inclusive on both ends.
inline constexpr int kFirstHour = 7;
inline constexpr int kLastHour = 21;

// Largest allowed gap between an hour and the weather observation used for it.
inline constexpr int kMaxWeatherStalenessMinutes = 180;

inline constexpr std::string_view kWaitTimesHeader = "timestamp,bridge,direction,vehicle_type,wait_minutes";
inline constexpr std::string_view kWeatherHeader = "timestamp,temperature_f,visibility,precipitation_in,condition";

struct RawWaitTimeRecord {
  CivilTime timestamp;
  Bridge bridge = Bridge::PB;
  Direction direction = Direction::to_us;
  Vehicle vehicle = Vehicle::passenger;
  double wait_minutes = 0.0;
};

struct WeatherRecord {
  CivilTime timestamp;
  double temperature_f = 0.0;
  int visibility = 10;  // 1 (least visible) .. 10
  double precipitation_in = 0.0;
  WeatherCondition condition = WeatherCondition::Clear;
};

struct HourlyWait {
  CivilTime hour_start;
  Bridge bridge = Bridge::PB;
  Direction direction = Direction::to_us;
  Vehicle vehicle = Vehicle::passenger;
  double mean_wait_minutes = 0.0;
  std::size_t sample_count = 0;
};

struct JoinedHour {
  HourlyWait wait;
  WeatherRecord weather;
};

// Throws DataError naming `source` and the offending line.
std::vector<RawWaitTimeRecord> parse_wait_times(std::string_view text, const std::string& source = "wait_times.csv");
std::vector<WeatherRecord> parse_weather(std::string_view text, const std::string& source = "weather.csv");

// Hourly means per (hour, bridge, direction, vehicle), sorted by that key.
// Samples outside kFirstHour..kLastHour are dropped. The result does not
// depend on input order.
std::vector<HourlyWait> aggregate_hourly(std::span<const RawWaitTimeRecord> records);

// Pairs each hour with the first weather record in the same clock hour, or
// else the latest earlier record at most kMaxWeatherStalenessMinutes old.
// `weather` must be sorted by timestamp.
std::vector<JoinedHour> join_weather(std::span<const HourlyWait> hours, std::span<const WeatherRecord> weather);

std::string write_wait_times(std::span<const RawWaitTimeRecord> records);
std::string write_weather(std::span<const WeatherRecord> records);

}  // namespace delaytree
