#include "delaytree/features.hpp"

#include <algorithm>
#include <array>

#include "delaytree/error.hpp"
#include "delaytree/text.hpp"

namespace delaytree {

namespace {

constexpr std::array kSeasons{Season::Spring, Season::Summer, Season::Fall, Season::Winter};
constexpr std::array kHourIntervals{HourInterval::Early_morning, HourInterval::Morning, HourInterval::Afternoon,
                                    HourInterval::Evening, HourInterval::Night};
constexpr std::array kConditions{WeatherCondition::Snow, WeatherCondition::Rain, WeatherCondition::Clear};

template <typename Enum, std::size_t N>
std::vector<std::string> level_names(const std::array<Enum, N>& values) {
  std::vector<std::string> out;
  for (Enum v : values) out.emplace_back(to_string(v));
  return out;
}

std::vector<std::string> number_levels(int first, int last) {
  std::vector<std::string> out;
  for (int i = first; i <= last; ++i) out.push_back(std::to_string(i));
  return out;
}

FeatureSchema build_observation_schema() {
  const std::vector<std::string> binary{"0", "1"};
  return FeatureSchema({
      {"month", FeatureKind::categorical, number_levels(1, 12)},
      {"season", FeatureKind::categorical, level_names(kSeasons)},
      {"hour_interval", FeatureKind::categorical, level_names(kHourIntervals)},
      {"weekend", FeatureKind::categorical, binary},
      {"us_holiday", FeatureKind::categorical, binary},
      {"canada_holiday", FeatureKind::categorical, binary},
      {"temperature_f", FeatureKind::continuous, {}},
      {"visibility", FeatureKind::categorical, number_levels(1, 10)},
      {"precipitation_in", FeatureKind::continuous, {}},
      {"condition", FeatureKind::categorical, level_names(kConditions)},
  });
}

template <typename Enum, std::size_t N>
std::optional<Enum> find_level(std::string_view text, const std::array<Enum, N>& values) {
  for (Enum v : values) {
    if (text == to_string(v)) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Season s) {
  switch (s) {
    case Season::Spring: return "Spring";
    case Season::Summer: return "Summer";
    case Season::Fall: return "Fall";
    case Season::Winter: return "Winter";
  }
  return "?";
}

std::string_view to_string(HourInterval h) {
  switch (h) {
    case HourInterval::Early_morning: return "Early_morning";
    case HourInterval::Morning: return "Morning";
    case HourInterval::Afternoon: return "Afternoon";
    case HourInterval::Evening: return "Evening";
    case HourInterval::Night: return "Night";
  }
  return "?";
}

std::string_view to_string(Country c) { return c == Country::US ? "US" : "CA"; }

Season season_of(int month) {
  if (month < 1 || month > 12) throw DataError("month out of range: " + std::to_string(month));
  switch (month) {
    case 3: case 4: case 5: return Season::Spring;
    case 6: case 7: case 8: return Season::Summer;
    case 9: case 10: case 11: return Season::Fall;
    default: return Season::Winter;
  }
}

HourInterval hour_interval_of(int hour) {
  if (hour < kFirstHour || hour > kLastHour) throw DataError("hour outside 7..21: " + std::to_string(hour));
  return kHourIntervals[static_cast<std::size_t>((hour - kFirstHour) / 3)];
}

void parse_holidays(std::string_view text, HolidayCalendars& into, const std::string& source) {
  CsvReader in(text, source);
  in.expect_header(kHolidaysHeader);
  while (in.next()) {
    in.require_fields(2);
    auto date = parse_date(in.field(0));
    if (!date) in.fail("malformed date '" + std::string(in.field(0)) + "', expected YYYY-MM-DD");
    if (iequals(in.field(1), "US")) {
      into.us.dates.insert(*date);
    } else if (iequals(in.field(1), "CA")) {
      into.ca.dates.insert(*date);
    } else {
      in.fail("unknown country '" + std::string(in.field(1)) + "', expected US or CA");
    }
  }
}

CalendarFlags calendar_flags(CivilDate date, const HolidayCalendar& us, const HolidayCalendar& ca) {
  if (us.country != Country::US || ca.country != Country::CA) {
    throw DomainError("holiday calendars passed with wrong country tags");
  }
  return {date.is_weekend(), us.contains(date), ca.contains(date)};
}

FeatureVector make_feature_vector(CivilTime hour_start, const WeatherRecord& weather,
                                  const HolidayCalendars& holidays) {
  FeatureVector fv;
  fv.month = hour_start.date.month;
  fv.season = season_of(fv.month);
  fv.hour_interval = hour_interval_of(hour_start.hour);
  auto flags = calendar_flags(hour_start.date, holidays.us, holidays.ca);
  fv.weekend = flags.weekend;
  fv.us_holiday = flags.us_holiday;
  fv.canada_holiday = flags.canada_holiday;
  fv.temperature_f = weather.temperature_f;
  fv.visibility = weather.visibility;
  fv.precipitation_in = weather.precipitation_in;
  fv.condition = weather.condition;
  return fv;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& f = features_[i];
    if (f.name.empty()) throw UsageError("feature name must not be empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (features_[j].name == f.name) throw UsageError("duplicate feature name '" + f.name + "'");
    }
    if (f.kind == FeatureKind::categorical) {
      if (f.levels.empty()) throw UsageError("categorical feature '" + f.name + "' has no levels");
      auto sorted = f.levels;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw UsageError("categorical feature '" + f.name + "' has duplicate levels");
      }
    } else if (!f.levels.empty()) {
      throw UsageError("continuous feature '" + f.name + "' must not declare levels");
    }
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::level_index(std::size_t feature, std::string_view level) const {
  const auto& levels = features_.at(feature).levels;
  auto it = std::find(levels.begin(), levels.end(), level);
  if (it == levels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - levels.begin());
}

const FeatureSchema& observation_schema() {
  static const FeatureSchema schema = build_observation_schema();
  return schema;
}

std::vector<double> encode(const FeatureVector& fv) {
  return {
      static_cast<double>(fv.month - 1),
      static_cast<double>(static_cast<int>(fv.season)),
      static_cast<double>(static_cast<int>(fv.hour_interval)),
      fv.weekend ? 1.0 : 0.0,
      fv.us_holiday ? 1.0 : 0.0,
      fv.canada_holiday ? 1.0 : 0.0,
      fv.temperature_f,
      static_cast<double>(fv.visibility - 1),
      fv.precipitation_in,
      static_cast<double>(static_cast<int>(fv.condition)),
  };
}

std::vector<std::string> feature_texts(const FeatureVector& fv) {
  return {
      std::to_string(fv.month),
      std::string(to_string(fv.season)),
      std::string(to_string(fv.hour_interval)),
      fv.weekend ? "1" : "0",
      fv.us_holiday ? "1" : "0",
      fv.canada_holiday ? "1" : "0",
      format_double(fv.temperature_f),
      std::to_string(fv.visibility),
      format_double(fv.precipitation_in),
      std::string(to_string(fv.condition)),
  };
}

FeatureVector parse_feature_texts(std::span<const std::string_view> texts) {
  const auto& schema = observation_schema();
  if (texts.size() != schema.size()) throw DataError("expected " + std::to_string(schema.size()) + " feature values");
  auto bad = [&](std::size_t i) -> DataError {
    return DataError("invalid " + schema[i].name + " value '" + std::string(texts[i]) + "'");
  };
  auto flag = [&](std::size_t i) {
    if (texts[i] == "0") return false;
    if (texts[i] == "1") return true;
    throw bad(i);
  };
  FeatureVector fv;
  auto month = parse_int(texts[0]);
  if (!month || *month < 1 || *month > 12) throw bad(0);
  fv.month = static_cast<int>(*month);
  auto season = find_level(texts[1], kSeasons);
  if (!season) throw bad(1);
  if (*season != season_of(fv.month)) throw DataError("season '" + std::string(texts[1]) + "' contradicts month");
  fv.season = *season;
  auto interval = find_level(texts[2], kHourIntervals);
  if (!interval) throw bad(2);
  fv.hour_interval = *interval;
  fv.weekend = flag(3);
  fv.us_holiday = flag(4);
  fv.canada_holiday = flag(5);
  auto temp = parse_double(texts[6]);
  if (!temp) throw bad(6);
  fv.temperature_f = *temp;
  auto vis = parse_int(texts[7]);
  if (!vis || *vis < 1 || *vis > 10) throw bad(7);
  fv.visibility = static_cast<int>(*vis);
  auto precip = parse_double(texts[8]);
  if (!precip || *precip < 0) throw bad(8);
  fv.precipitation_in = *precip;
  auto cond = find_level(texts[9], kConditions);
  if (!cond) throw bad(9);
  fv.condition = *cond;
  return fv;
}

}  // namespace delaytree
