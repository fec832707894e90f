#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delaytree/cart.hpp"
#include "delaytree/features.hpp"
#include "delaytree/ingest.hpp"
#include "delaytree/types.hpp"

namespace delaytree {

enum class DelayCategory4 { no_delay, slight_delay, delay, heavy_delay };
enum class DelayCategory3 { slight_delay, delay, heavy_delay };

// Upper bounds (inclusive) of the slight_delay and delay bands, in minutes.
inline constexpr double kSlightDelayMaxMinutes = 15.0;
inline constexpr double kDelayMaxMinutes = 30.0;

// "no delay", "slight delay", "delay", "heavy delay"
std::string_view to_string(DelayCategory4 c);
std::string_view to_string(DelayCategory3 c);

// 0 -> no_delay, (0,15] -> slight_delay, (15,30] -> delay, (30,inf) ->
// heavy_delay. Throws DataError on negative or non-finite input.
DelayCategory4 categorize(double wait_minutes);

// Folds no_delay into slight_delay.
DelayCategory3 merge(DelayCategory4 c);

// One delay category per bridge, in bridges_for() order.
class DelayPattern {
 public:
  DelayPattern() = default;
  explicit DelayPattern(std::vector<DelayCategory3> levels) : levels_(std::move(levels)) {}

  const std::vector<DelayCategory3>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }

  // Hyphen-joined level names, e.g. "delay-slight delay-slight delay".
  std::string label() const;

  // Inverse of label(). Throws DataError on unknown level names.
  static DelayPattern parse(std::string_view label);

  friend auto operator<=>(const DelayPattern&, const DelayPattern&) = default;

 private:
  std::vector<DelayCategory3> levels_;
};

// All 3^bridges patterns in lexicographic level order.
std::vector<DelayPattern> enumerate_patterns(std::size_t bridges);

struct PatternRow {
  CivilTime hour_start;
  std::vector<double> waits;  // per bridge, bridges_for() order
  FeatureVector features;
  DelayPattern pattern;
};

struct PatternDataset {
  Stream stream;
  std::vector<PatternRow> rows;
  // Hours dropped because a bridge had no value.
  std::size_t skipped_incomplete = 0;
  // Hours dropped because every bridge waited exactly 0 minutes.
  std::size_t dropped_all_zero = 0;

  const FeatureSchema& schema() const { return observation_schema(); }
};

// Builds the classification rows for one stream: hours missing a bridge are
// skipped and tallied, all-zero hours are dropped, and the remaining hours
// are categorized, merged and concatenated into a pattern. Rows come out in
// hour order.
PatternDataset assemble_rows(std::span<const JoinedHour> hours, Stream stream, const HolidayCalendars& holidays);

// Pattern counts, descending by count then ascending by label.
std::vector<std::pair<DelayPattern, std::size_t>> pattern_frequencies(const PatternDataset& ds);

TrainingSet to_training_set(const PatternDataset& ds);

DelayPattern predict_pattern(const DecisionTree& tree, const FeatureVector& x);

inline constexpr std::string_view kObservationsHeader =
    "hour_start,direction,vehicle,wait_pb,wait_rb,wait_lq,pattern,month,season,hour_interval,weekend,us_holiday,"
    "canada_holiday,temperature_f,visibility,precipitation_in,condition";

// Rows of every dataset, in the order given.
std::string write_observations(std::span<const PatternDataset> datasets);

// Groups rows by stream, in kAllStreams order; streams without rows are
// omitted. Throws DataError naming the line on malformed input.
std::vector<PatternDataset> read_observations(std::string_view text, const std::string& source = "observations.csv");

}  // namespace delaytree
