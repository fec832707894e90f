#include <doctest.h>

#include <set>

#include "delaytree/error.hpp"
#include "delaytree/patterns.hpp"
#include "delaytree/synth.hpp"
#include "test_support.hpp"

using namespace delaytree;

namespace {

// Independent label oracle: scan (inclusive upper bound, merged name) bands.
std::string oracle_level(double wait) {
  static const std::pair<double, const char*> bands[] = {{15.0, "slight delay"}, {30.0, "delay"}};
  for (const auto& [upper, name] : bands) {
    if (wait <= upper) return name;
  }
  return "heavy delay";
}

std::string oracle_label(std::initializer_list<double> waits) {
  std::string out;
  for (double w : waits) out += (out.empty() ? "" : "-") + oracle_level(w);
  return out;
}

JoinedHour joined(CivilTime t, Bridge b, Vehicle v, double wait) {
  HourlyWait h{t, b, Direction::to_us, v, wait, 1};
  return {h, WeatherRecord{t, 70.0, 10, 0.0, WeatherCondition::Clear}};
}

CivilTime at(int day, int hour) { return {{2016, 8, day}, hour, 0}; }

}  // namespace

TEST_CASE("categorize uses closed-right bands") {
  CHECK(categorize(0) == DelayCategory4::no_delay);
  CHECK(categorize(1e-9) == DelayCategory4::slight_delay);
  CHECK(categorize(15) == DelayCategory4::slight_delay);
  CHECK(categorize(15.0000001) == DelayCategory4::delay);
  CHECK(categorize(30) == DelayCategory4::delay);
  CHECK(categorize(30.5) == DelayCategory4::heavy_delay);
  CHECK_THROWS_AS(categorize(-1), DataError);
  CHECK_THROWS_AS(categorize(std::nan("")), DataError);
}

TEST_CASE("categorize is monotone and merge folds [0,15] into slight delay") {
  DelayCategory4 prev = DelayCategory4::no_delay;
  for (int i = 0; i <= 6000; ++i) {
    double w = i * 0.01;
    auto c = categorize(w);
    CHECK(static_cast<int>(c) >= static_cast<int>(prev));
    prev = c;
    if (w <= 15.0) CHECK(merge(c) == DelayCategory3::slight_delay);
    CHECK(to_string(merge(c)) == oracle_level(w));
  }
}

TEST_CASE("pattern spaces have 27 and 9 labels that round-trip") {
  for (auto [bridges, size] : {std::pair{3u, 27u}, std::pair{2u, 9u}}) {
    auto all = enumerate_patterns(bridges);
    CHECK(all.size() == size);
    std::set<std::string> labels;
    for (const auto& p : all) {
      labels.insert(p.label());
      CHECK(DelayPattern::parse(p.label()) == p);
    }
    CHECK(labels.size() == size);
  }
  CHECK(enumerate_patterns(3).front().label() == "slight delay-slight delay-slight delay");
  CHECK_THROWS_AS(DelayPattern::parse("delay-slow"), DataError);
  CHECK_THROWS_AS(DelayPattern::parse(""), DataError);
}

TEST_CASE("assemble_rows applies drop, categorize, merge and concatenate") {
  HolidayCalendars cal;
  std::vector<JoinedHour> hours{
      joined(at(22, 7), Bridge::PB, Vehicle::passenger, 0), joined(at(22, 7), Bridge::RB, Vehicle::passenger, 0),
      joined(at(22, 7), Bridge::LQ, Vehicle::passenger, 0),
      joined(at(22, 8), Bridge::PB, Vehicle::passenger, 20), joined(at(22, 8), Bridge::RB, Vehicle::passenger, 5),
      joined(at(22, 8), Bridge::LQ, Vehicle::passenger, 0),
      joined(at(22, 9), Bridge::PB, Vehicle::passenger, 20),  // RB, LQ missing
      joined(at(22, 8), Bridge::PB, Vehicle::commercial, 35), joined(at(22, 8), Bridge::LQ, Vehicle::commercial, 10),
  };
  auto pass = assemble_rows(hours, {Vehicle::passenger, Direction::to_us}, cal);
  REQUIRE(pass.rows.size() == 1);
  CHECK(pass.dropped_all_zero == 1);
  CHECK(pass.skipped_incomplete == 1);
  CHECK(pass.rows[0].pattern.label() == "delay-slight delay-slight delay");
  CHECK(pass.rows[0].pattern.label() == oracle_label({20, 5, 0}));
  CHECK(pass.rows[0].features.hour_interval == HourInterval::Early_morning);

  auto truck = assemble_rows(hours, {Vehicle::commercial, Direction::to_us}, cal);
  REQUIRE(truck.rows.size() == 1);
  CHECK(truck.rows[0].pattern.label() == "heavy delay-slight delay");
  CHECK(truck.rows[0].pattern.label() == oracle_label({35, 10}));
  CHECK(assemble_rows(hours, {Vehicle::passenger, Direction::to_can}, cal).rows.empty());
}

TEST_CASE("assemble_rows matches the table oracle on random wait tuples") {
  Rng rng(5);
  HolidayCalendars cal;
  std::vector<JoinedHour> hours;
  std::vector<std::array<double, 3>> waits;
  for (int h = 0; h < 15 * 20; ++h) {
    CivilTime t{CivilDate{2016, 9, 1}.plus_days(h / 15), 7 + h % 15, 0};
    std::array<double, 3> w{};
    for (auto& v : w) v = rng.uniform() < 0.3 ? 0.0 : std::round(rng.uniform() * 50 * 4) / 4;
    waits.push_back(w);
    for (std::size_t b = 0; b < 3; ++b) hours.push_back(joined(t, kAllBridges[b], Vehicle::passenger, w[b]));
  }
  auto ds = assemble_rows(hours, {Vehicle::passenger, Direction::to_us}, cal);
  std::size_t k = 0;
  std::size_t zero = 0;
  for (const auto& w : waits) {
    if (w[0] == 0 && w[1] == 0 && w[2] == 0) {
      ++zero;
      continue;
    }
    REQUIRE(k < ds.rows.size());
    CHECK(ds.rows[k].pattern.label() == oracle_label({w[0], w[1], w[2]}));
    ++k;
  }
  CHECK(k == ds.rows.size());
  CHECK(ds.dropped_all_zero == zero);
  for (const auto& row : ds.rows) {
    CHECK(std::any_of(row.waits.begin(), row.waits.end(), [](double w) { return w != 0.0; }));
  }
}

TEST_CASE("pattern_frequencies") {
  PatternDataset empty;
  CHECK(pattern_frequencies(empty).empty());

  PatternDataset same;
  for (int i = 0; i < 3; ++i) same.rows.push_back({at(22, 7 + i), {1, 1, 1}, {}, DelayPattern::parse("delay-delay-delay")});
  auto f = pattern_frequencies(same);
  REQUIRE(f.size() == 1);
  CHECK(f[0].second == 3);

  // Planted 60/40 mix; the generator keeps its own tally.
  Rng rng(42);
  const auto a = DelayPattern::parse("delay-slight delay-slight delay");
  const auto b = DelayPattern::parse("slight delay-heavy delay-slight delay");
  PatternDataset mix;
  std::size_t tally_a = 0;
  for (int i = 0; i < 1000; ++i) {
    bool pick_a = rng.uniform() < 0.6;
    tally_a += pick_a;
    mix.rows.push_back({at(22, 7), {1, 1, 1}, {}, pick_a ? a : b});
  }
  auto freq = pattern_frequencies(mix);
  REQUIRE(freq.size() == 2);
  CHECK(freq[0].second + freq[1].second == 1000);
  CHECK(freq[0].first == a);  // the larger bucket comes first
  CHECK(freq[0].second == tally_a);
  CHECK(freq[1].second == 1000 - tally_a);
}

TEST_CASE("observations.csv round-trips and rejects inconsistent rows") {
  HolidayCalendars cal;
  parse_holidays(testing::fixture("three_day_holidays.csv"), cal);
  auto hours = join_weather(aggregate_hourly(parse_wait_times(testing::fixture("three_day_wait_times.csv"))),
                            parse_weather(testing::fixture("three_day_weather.csv")));
  std::vector<PatternDataset> sets;
  for (Stream s : kAllStreams) sets.push_back(assemble_rows(hours, s, cal));
  const std::string text = write_observations(sets);
  auto back = read_observations(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].stream == Stream{Vehicle::passenger, Direction::to_us});
  CHECK(back[1].stream == Stream{Vehicle::commercial, Direction::to_us});
  REQUIRE(back[0].rows.size() == sets[0].rows.size());
  for (std::size_t i = 0; i < back[0].rows.size(); ++i) {
    CHECK(back[0].rows[i].pattern == sets[0].rows[i].pattern);
    CHECK(back[0].rows[i].features == sets[0].rows[i].features);
    CHECK(back[0].rows[i].waits == sets[0].rows[i].waits);
  }
  CHECK(write_observations(back) == text);
  CHECK(text.find(",commercial,35,,10,heavy delay-slight delay,") != std::string::npos);

  std::string bad = text;
  bad.replace(bad.find("heavy delay-slight delay,"), 24, "heavy delay-slight delay-delay");
  CHECK_THROWS_AS(read_observations(bad), DataError);
}
