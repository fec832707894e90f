#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delaytree/civil_time.hpp"
#include "delaytree/ingest.hpp"
#include "delaytree/types.hpp"

namespace delaytree {

enum class Season { Spring, Summer, Fall, Winter };
enum class HourInterval { Early_morning, Morning, Afternoon, Evening, Night };
enum class Country { US, CA };

std::string_view to_string(Season s);
std::string_view to_string(HourInterval h);
std::string_view to_string(Country c);

// {3,4,5} Spring, {6,7,8} Summer, {9,10,11} Fall, {12,1,2} Winter.
// Throws DataError outside 1..12.
Season season_of(int month);

// 7-9 Early_morning, 10-12 Morning, 13-15 Afternoon, 16-18 Evening,
// 19-21 Night. Throws DataError outside 7..21.
HourInterval hour_interval_of(int hour);

struct HolidayCalendar {
  Country country = Country::US;
  std::set<CivilDate> dates;

  bool contains(CivilDate d) const { return dates.contains(d); }
};

struct HolidayCalendars {
  HolidayCalendar us{Country::US, {}};
  HolidayCalendar ca{Country::CA, {}};
};

inline constexpr std::string_view kHolidaysHeader = "date,country";

// Parses `date,country` rows and appends to `into`. Duplicate dates within a
// country collapse.
void parse_holidays(std::string_view text, HolidayCalendars& into, const std::string& source = "holidays.csv");

struct CalendarFlags {
  bool weekend = false;
  bool us_holiday = false;
  bool canada_holiday = false;

  friend bool operator==(const CalendarFlags&, const CalendarFlags&) = default;
};

// Throws DomainError if the calendars carry the wrong country tags.
CalendarFlags calendar_flags(CivilDate date, const HolidayCalendar& us, const HolidayCalendar& ca);

// Descriptive features of one hourly observation.
struct FeatureVector {
  int month = 1;
  Season season = Season::Winter;
  HourInterval hour_interval = HourInterval::Early_morning;
  bool weekend = false;
  bool us_holiday = false;
  bool canada_holiday = false;
  double temperature_f = 0.0;
  int visibility = 10;
  double precipitation_in = 0.0;
  WeatherCondition condition = WeatherCondition::Clear;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector make_feature_vector(CivilTime hour_start, const WeatherRecord& weather, const HolidayCalendars& holidays);

enum class FeatureKind { continuous, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  std::vector<std::string> levels;  // declared order; empty for continuous

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Ordered feature declarations. The order is part of the learner's
// tie-breaking contract, so it is never re-sorted.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  std::size_t size() const noexcept { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_.at(i); }
  const std::vector<FeatureSpec>& features() const noexcept { return features_; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::size_t> level_index(std::size_t feature, std::string_view level) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<FeatureSpec> features_;
};

// month, season, hour_interval, weekend, us_holiday, canada_holiday,
// temperature_f, visibility, precipitation_in, condition.
const FeatureSchema& observation_schema();

// Numeric row under observation_schema(): continuous features carry their
// value, categorical ones the index of their level.
std::vector<double> encode(const FeatureVector& fv);

// Level text (or number text for continuous features), indexed like the
// schema. Used for CSV output.
std::vector<std::string> feature_texts(const FeatureVector& fv);

// Inverse of feature_texts. Throws DataError on unknown levels or
// season/hour-interval inconsistent with month.
FeatureVector parse_feature_texts(std::span<const std::string_view> texts);

}  // namespace delaytree
