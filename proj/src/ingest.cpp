#include "delaytree/ingest.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "delaytree/error.hpp"
#include "delaytree/text.hpp"

namespace delaytree {

namespace {

CivilTime require_time(const CsvReader& in, std::string_view text) {
  auto t = parse_civil_time(text);
  if (!t) in.fail("malformed timestamp '" + std::string(text) + "', expected YYYY-MM-DDTHH:MM");
  return *t;
}

double require_double(const CsvReader& in, std::string_view text, std::string_view what) {
  auto v = parse_double(text);
  if (!v) in.fail("malformed " + std::string(what) + " '" + std::string(text) + "'");
  return *v;
}

}  // namespace

std::vector<RawWaitTimeRecord> parse_wait_times(std::string_view text, const std::string& source) {
  CsvReader in(text, source);
  in.expect_header(kWaitTimesHeader);
  std::vector<RawWaitTimeRecord> out;
  while (in.next()) {
    in.require_fields(5);
    RawWaitTimeRecord rec;
    rec.timestamp = require_time(in, in.field(0));
    auto bridge = parse_bridge(in.field(1));
    if (!bridge) in.fail("unknown bridge '" + std::string(in.field(1)) + "'");
    auto direction = parse_direction(in.field(2));
    if (!direction) in.fail("unknown direction '" + std::string(in.field(2)) + "'");
    auto vehicle = parse_vehicle(in.field(3));
    if (!vehicle) in.fail("unknown vehicle type '" + std::string(in.field(3)) + "'");
    rec.bridge = *bridge;
    rec.direction = *direction;
    rec.vehicle = *vehicle;
    rec.wait_minutes = require_double(in, in.field(4), "wait_minutes");
    if (rec.wait_minutes < 0) in.fail("negative wait time");
    if (!carries(rec.bridge, rec.vehicle)) in.fail("commercial vehicles are not permitted on RB");
    out.push_back(rec);
  }
  return out;
}

std::vector<WeatherRecord> parse_weather(std::string_view text, const std::string& source) {
  CsvReader in(text, source);
  in.expect_header(kWeatherHeader);
  std::vector<WeatherRecord> out;
  while (in.next()) {
    in.require_fields(5);
    WeatherRecord rec;
    rec.timestamp = require_time(in, in.field(0));
    // Sub-zero Fahrenheit readings are real in Buffalo winters; not rejected.
    rec.temperature_f = require_double(in, in.field(1), "temperature_f");
    auto vis = parse_int(in.field(2));
    if (!vis || *vis < 1 || *vis > 10) in.fail("visibility must be an integer in 1..10");
    rec.visibility = static_cast<int>(*vis);
    rec.precipitation_in = require_double(in, in.field(3), "precipitation_in");
    if (rec.precipitation_in < 0) in.fail("negative precipitation");
    auto cond = parse_condition(in.field(4));
    if (!cond) in.fail("unknown weather condition '" + std::string(in.field(4)) + "'");
    rec.condition = *cond;
    out.push_back(rec);
  }
  return out;
}

std::vector<HourlyWait> aggregate_hourly(std::span<const RawWaitTimeRecord> records) {
  using Key = std::tuple<CivilTime, Bridge, Direction, Vehicle>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.timestamp.hour < kFirstHour || r.timestamp.hour > kLastHour) continue;
    groups[Key{r.timestamp.floor_hour(), r.bridge, r.direction, r.vehicle}].push_back(r.wait_minutes);
  }
  std::vector<HourlyWait> out;
  out.reserve(groups.size());
  for (auto& [key, values] : groups) {
    // Sorted summation makes the mean bit-identical under any input order.
    std::sort(values.begin(), values.end());
    double sum = std::accumulate(values.begin(), values.end(), 0.0);
    double mean = std::clamp(sum / static_cast<double>(values.size()), values.front(), values.back());
    auto [hour, bridge, direction, vehicle] = key;
    out.push_back({hour, bridge, direction, vehicle, mean, values.size()});
  }
  return out;
}

std::vector<JoinedHour> join_weather(std::span<const HourlyWait> hours, std::span<const WeatherRecord> weather) {
  auto by_time = [](const WeatherRecord& a, const WeatherRecord& b) { return a.timestamp < b.timestamp; };
  if (!std::is_sorted(weather.begin(), weather.end(), by_time)) {
    throw DataError("weather records are not sorted by timestamp");
  }
  std::vector<JoinedHour> out;
  out.reserve(hours.size());
  for (const auto& h : hours) {
    const std::int64_t start = h.hour_start.minutes();
    auto same_hour = std::lower_bound(weather.begin(), weather.end(), start, [](const WeatherRecord& w, std::int64_t t) {
      return w.timestamp.minutes() < t;
    });
    if (same_hour != weather.end() && same_hour->timestamp.minutes() < start + 60) {
      out.push_back({h, *same_hour});
      continue;
    }
    // same_hour is the first record at or after `start`; its predecessor is the latest earlier one.
    if (same_hour != weather.begin()) {
      const auto& prev = *std::prev(same_hour);
      if (start - prev.timestamp.minutes() <= kMaxWeatherStalenessMinutes) {
        out.push_back({h, prev});
        continue;
      }
    }
    throw DataError("no weather observation within 3 hours of " + format_civil_time(h.hour_start));
  }
  return out;
}

std::string write_wait_times(std::span<const RawWaitTimeRecord> records) {
  std::ostringstream out;
  out << kWaitTimesHeader << '\n';
  for (const auto& r : records) {
    out << format_civil_time(r.timestamp) << ',' << to_string(r.bridge) << ',' << to_string(r.direction) << ','
        << to_string(r.vehicle) << ',' << format_double(r.wait_minutes) << '\n';
  }
  return out.str();
}

std::string write_weather(std::span<const WeatherRecord> records) {
  std::ostringstream out;
  out << kWeatherHeader << '\n';
  for (const auto& r : records) {
    out << format_civil_time(r.timestamp) << ',' << format_double(r.temperature_f) << ',' << r.visibility << ','
        << format_double(r.precipitation_in) << ',' << to_string(r.condition) << '\n';
  }
  return out.str();
}

}  // namespace delaytree
