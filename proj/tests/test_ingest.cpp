#include <doctest.h>

#include <algorithm>
#include <random>

#include "delaytree/error.hpp"
#include "delaytree/ingest.hpp"
#include "test_support.hpp"

using namespace delaytree;

namespace {

std::string wait_csv(const std::string& rows) { return std::string(kWaitTimesHeader) + "\n" + rows; }
std::string weather_csv(const std::string& rows) { return std::string(kWeatherHeader) + "\n" + rows; }

CivilTime at(int day, int hour, int minute = 0) { return {{2016, 8, day}, hour, minute}; }

RawWaitTimeRecord sample(CivilTime t, double wait, Bridge b = Bridge::PB) {
  return {t, b, Direction::to_us, Vehicle::passenger, wait};
}

WeatherRecord weather_at(CivilTime t, double temp = 70) { return {t, temp, 10, 0.0, WeatherCondition::Clear}; }

}  // namespace

TEST_CASE("parse_wait_times maps fields and matches enums case-insensitively") {
  auto recs = parse_wait_times(wait_csv("2016-08-22T07:05,PB,to_us,passenger,12.0\n2016-08-22T07:10,lq,TO_CAN,Commercial,3\n"));
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].timestamp == at(22, 7, 5));
  CHECK(recs[0].bridge == Bridge::PB);
  CHECK(recs[0].direction == Direction::to_us);
  CHECK(recs[0].vehicle == Vehicle::passenger);
  CHECK(recs[0].wait_minutes == 12.0);
  CHECK(recs[1].bridge == Bridge::LQ);
  CHECK(recs[1].direction == Direction::to_can);
  CHECK(recs[1].vehicle == Vehicle::commercial);
}

TEST_CASE("parse_wait_times rejects bad rows with the line number") {
  auto line_of = [](const std::string& rows) {
    try {
      parse_wait_times(wait_csv(rows));
    } catch (const DataError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("2016-08-22T07:05,RB,to_us,commercial,5\n") == 2);
  CHECK(line_of("2016-08-22T07:05,PB,to_us,passenger,1\n2016-08-22T07:05,PB,to_us,passenger,-1\n") == 3);
  CHECK(line_of("2016-08-22 07:05,PB,to_us,passenger,1\n") == 2);
  CHECK(line_of("2016-02-30T07:05,PB,to_us,passenger,1\n") == 2);
  CHECK(line_of("2016-08-22T07:05,XB,to_us,passenger,1\n") == 2);
  CHECK(line_of("2016-08-22T07:05,PB,north,passenger,1\n") == 2);
  CHECK(line_of("2016-08-22T07:05,PB,to_us,bus,1\n") == 2);
  CHECK(line_of("2016-08-22T07:05,PB,to_us,passenger,abc\n") == 2);
  CHECK(line_of("2016-08-22T07:05,PB,to_us,passenger\n") == 2);
  CHECK_THROWS_AS(parse_wait_times("time,bridge\n"), DataError);
}

TEST_CASE("parse_weather validates ranges and accepts sub-zero temperatures") {
  auto recs = parse_weather(weather_csv("2017-01-05T08:00,-4.5,3,0.2,Snow\n"));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].temperature_f == -4.5);
  CHECK(recs[0].visibility == 3);
  CHECK(recs[0].condition == WeatherCondition::Snow);
  CHECK_THROWS_AS(parse_weather(weather_csv("2017-01-05T08:00,20,11,0,Clear\n")), DataError);
  CHECK_THROWS_AS(parse_weather(weather_csv("2017-01-05T08:00,20,0,0,Clear\n")), DataError);
  CHECK_THROWS_AS(parse_weather(weather_csv("2017-01-05T08:00,20,5,-0.1,Rain\n")), DataError);
  CHECK_THROWS_AS(parse_weather(weather_csv("2017-01-05T08:00,20,5,0,Fog\n")), DataError);
}

TEST_CASE("aggregate_hourly averages each hour") {
  SUBCASE("constant samples") {
    std::vector<RawWaitTimeRecord> recs;
    for (int i = 0; i < 12; ++i) recs.push_back(sample(at(22, 8, 5 * i), 10.0));
    auto hours = aggregate_hourly(recs);
    REQUIRE(hours.size() == 1);
    CHECK(hours[0].hour_start == at(22, 8));
    CHECK(hours[0].mean_wait_minutes == 10.0);
    CHECK(hours[0].sample_count == 12);
  }
  SUBCASE("0..11 averages to 5.5") {
    std::vector<RawWaitTimeRecord> recs;
    for (int i = 0; i < 12; ++i) recs.push_back(sample(at(22, 9, 5 * i), i));
    auto hours = aggregate_hourly(recs);
    REQUIRE(hours.size() == 1);
    CHECK(hours[0].mean_wait_minutes == 5.5);
  }
  SUBCASE("samples outside 7..21 are dropped") {
    std::vector<RawWaitTimeRecord> recs{sample(at(22, 6, 55), 3.0), sample(at(22, 22, 0), 3.0),
                                        sample(at(22, 21, 55), 4.0), sample(at(22, 7, 0), 5.0)};
    auto hours = aggregate_hourly(recs);
    REQUIRE(hours.size() == 2);
    CHECK(hours[0].hour_start.hour == 7);
    CHECK(hours[1].hour_start.hour == 21);
  }
  SUBCASE("single RB sample passes through") {
    auto hours = aggregate_hourly(std::vector{sample(at(22, 10), 17.0, Bridge::RB)});
    REQUIRE(hours.size() == 1);
    CHECK(hours[0].mean_wait_minutes == 17.0);
    CHECK(hours[0].sample_count == 1);
  }
  CHECK(aggregate_hourly({}).empty());
}

TEST_CASE("aggregate_hourly properties on random input") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> day(1, 3), hour(0, 23), minute(0, 59), pick(0, 3);
  std::uniform_real_distribution<double> wait(0.0, 60.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RawWaitTimeRecord> recs;
    const int n = 1 + static_cast<int>(gen() % 400);
    for (int i = 0; i < n; ++i) {
      Bridge b = kAllBridges[static_cast<std::size_t>(pick(gen) % 3)];
      Vehicle v = b == Bridge::RB ? Vehicle::passenger : kAllVehicles[static_cast<std::size_t>(pick(gen) % 2)];
      recs.push_back({at(20 + day(gen), hour(gen), minute(gen)), b,
                      kAllDirections[static_cast<std::size_t>(pick(gen) % 2)], v, wait(gen)});
    }
    auto base = aggregate_hourly(recs);
    auto shuffled = recs;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    auto again = aggregate_hourly(shuffled);
    REQUIRE(base.size() == again.size());
    std::size_t in_window = static_cast<std::size_t>(std::count_if(recs.begin(), recs.end(), [](const auto& r) {
      return r.timestamp.hour >= kFirstHour && r.timestamp.hour <= kLastHour;
    }));
    std::size_t counted = 0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(base[i].hour_start == again[i].hour_start);
      CHECK(base[i].mean_wait_minutes == again[i].mean_wait_minutes);  // bit-identical
      CHECK(base[i].sample_count == again[i].sample_count);
      CHECK(base[i].hour_start.hour >= kFirstHour);
      CHECK(base[i].hour_start.hour <= kLastHour);
      counted += base[i].sample_count;
      double lo = 1e9, hi = -1e9;
      for (const auto& r : recs) {
        if (r.timestamp.floor_hour() == base[i].hour_start && r.bridge == base[i].bridge &&
            r.direction == base[i].direction && r.vehicle == base[i].vehicle) {
          lo = std::min(lo, r.wait_minutes);
          hi = std::max(hi, r.wait_minutes);
        }
      }
      CHECK(base[i].mean_wait_minutes >= lo);
      CHECK(base[i].mean_wait_minutes <= hi);
    }
    CHECK(counted == in_window);
  }
}

TEST_CASE("join_weather pairs exact hours and nearest predecessors") {
  HourlyWait h8{at(22, 8), Bridge::PB, Direction::to_us, Vehicle::passenger, 5.0, 12};
  HourlyWait h9 = h8;
  h9.hour_start = at(22, 9);
  HourlyWait h12 = h8;
  h12.hour_start = at(22, 12);

  SUBCASE("exact") {
    auto joined = join_weather(std::vector{h8}, std::vector{weather_at(at(22, 7)), weather_at(at(22, 8), 71)});
    REQUIRE(joined.size() == 1);
    CHECK(joined[0].weather.timestamp == at(22, 8));
  }
  SUBCASE("record later in the same clock hour counts as a match") {
    auto joined = join_weather(std::vector{h8}, std::vector{weather_at(at(22, 7)), weather_at(at(22, 8, 45))});
    CHECK(joined[0].weather.timestamp == at(22, 8, 45));
  }
  SUBCASE("predecessor within three hours") {
    auto joined = join_weather(std::vector{h9}, std::vector{weather_at(at(22, 7, 30)), weather_at(at(22, 10))});
    CHECK(joined[0].weather.timestamp == at(22, 7, 30));
  }
  SUBCASE("gap over three hours") {
    CHECK_THROWS_AS(join_weather(std::vector{h12}, std::vector{weather_at(at(22, 8))}), DataError);
    CHECK_NOTHROW(join_weather(std::vector{h12}, std::vector{weather_at(at(22, 9))}));
  }
  SUBCASE("unsorted weather is rejected") {
    CHECK_THROWS_AS(join_weather(std::vector{h8}, std::vector{weather_at(at(22, 9)), weather_at(at(22, 8))}),
                    DataError);
  }
}

TEST_CASE("join_weather agrees with a linear-scan oracle") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeatherRecord> weather;
    std::int64_t t = CivilTime{at(22, 0)}.minutes();
    const int n = 1 + static_cast<int>(gen() % 12);
    for (int i = 0; i < n; ++i) {
      t += static_cast<std::int64_t>(gen() % 200);
      weather.push_back(weather_at(CivilTime::from_minutes(t), i));
    }
    for (int hour = kFirstHour; hour <= kLastHour; ++hour) {
      HourlyWait h{at(22, hour), Bridge::PB, Direction::to_us, Vehicle::passenger, 1.0, 1};
      const std::int64_t start = h.hour_start.minutes();
      // Oracle: first record inside the hour, else the latest earlier one within 180 minutes.
      const WeatherRecord* expected = nullptr;
      for (const auto& w : weather) {
        if (w.timestamp.minutes() >= start && w.timestamp.minutes() < start + 60) {
          expected = &w;
          break;
        }
      }
      if (!expected) {
        for (const auto& w : weather) {
          if (w.timestamp.minutes() < start && start - w.timestamp.minutes() <= 180) expected = &w;
        }
      }
      if (expected) {
        auto joined = join_weather(std::vector{h}, weather);
        CHECK(joined[0].weather.timestamp == expected->timestamp);
        CHECK(joined[0].weather.temperature_f == expected->temperature_f);
      } else {
        CHECK_THROWS_AS(join_weather(std::vector{h}, weather), DataError);
      }
    }
  }
}

TEST_CASE("three-day fixture aggregates as built") {
  auto recs = parse_wait_times(testing::fixture("three_day_wait_times.csv"));
  CHECK(recs.size() == 39);
  auto hours = aggregate_hourly(recs);
  CHECK(hours.size() == 22);
  std::size_t samples = 0;
  for (const auto& h : hours) samples += h.sample_count;
  CHECK(samples == 37);
  auto joined = join_weather(hours, parse_weather(testing::fixture("three_day_weather.csv")));
  CHECK(joined.size() == 22);
}

TEST_CASE("writers round-trip through the parsers") {
  std::vector<RawWaitTimeRecord> recs{sample(at(22, 7, 5), 12.25), {at(22, 7, 10), Bridge::LQ, Direction::to_can,
                                                                      Vehicle::commercial, 0.1}};
  auto back = parse_wait_times(write_wait_times(recs));
  REQUIRE(back.size() == 2);
  CHECK(back[1].wait_minutes == 0.1);
  CHECK(back[1].vehicle == Vehicle::commercial);
  std::vector<WeatherRecord> w{{at(22, 7), -3.25, 4, 0.12, WeatherCondition::Rain}};
  auto wb = parse_weather(write_weather(w));
  CHECK(wb[0].temperature_f == -3.25);
  CHECK(wb[0].precipitation_in == 0.12);
}
