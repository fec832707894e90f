#include "delaytree/patterns.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include "delaytree/error.hpp"
#include "delaytree/text.hpp"

namespace delaytree {

namespace {

constexpr std::array kCategories3{DelayCategory3::slight_delay, DelayCategory3::delay, DelayCategory3::heavy_delay};

std::size_t wait_column(Bridge b) {
  switch (b) {
    case Bridge::PB: return 3;
    case Bridge::RB: return 4;
    case Bridge::LQ: return 5;
  }
  return 3;
}

}  // namespace

std::string_view to_string(DelayCategory4 c) {
  switch (c) {
    case DelayCategory4::no_delay: return "no delay";
    case DelayCategory4::slight_delay: return "slight delay";
    case DelayCategory4::delay: return "delay";
    case DelayCategory4::heavy_delay: return "heavy delay";
  }
  return "?";
}

std::string_view to_string(DelayCategory3 c) {
  switch (c) {
    case DelayCategory3::slight_delay: return "slight delay";
    case DelayCategory3::delay: return "delay";
    case DelayCategory3::heavy_delay: return "heavy delay";
  }
  return "?";
}

DelayCategory4 categorize(double wait_minutes) {
  if (!std::isfinite(wait_minutes) || wait_minutes < 0) {
    throw DataError("wait time must be a non-negative number, got " + format_double(wait_minutes));
  }
  if (wait_minutes == 0.0) return DelayCategory4::no_delay;
  if (wait_minutes <= kSlightDelayMaxMinutes) return DelayCategory4::slight_delay;
  if (wait_minutes <= kDelayMaxMinutes) return DelayCategory4::delay;
  return DelayCategory4::heavy_delay;
}

DelayCategory3 merge(DelayCategory4 c) {
  switch (c) {
    case DelayCategory4::no_delay:
    case DelayCategory4::slight_delay: return DelayCategory3::slight_delay;
    case DelayCategory4::delay: return DelayCategory3::delay;
    case DelayCategory4::heavy_delay: return DelayCategory3::heavy_delay;
  }
  return DelayCategory3::slight_delay;
}

std::string DelayPattern::label() const {
  std::string out;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i > 0) out += '-';
    out += to_string(levels_[i]);
  }
  return out;
}

DelayPattern DelayPattern::parse(std::string_view label) {
  std::vector<DelayCategory3> levels;
  for (auto part : split(label, '-')) {
    auto it = std::find_if(kCategories3.begin(), kCategories3.end(),
                           [&](DelayCategory3 c) { return part == to_string(c); });
    if (it == kCategories3.end()) throw DataError("unknown delay level '" + std::string(part) + "' in pattern");
    levels.push_back(*it);
  }
  return DelayPattern(std::move(levels));
}

std::vector<DelayPattern> enumerate_patterns(std::size_t bridges) {
  std::vector<DelayPattern> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < bridges; ++i) total *= kCategories3.size();
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<DelayCategory3> levels(bridges);
    std::size_t rest = code;
    for (std::size_t i = bridges; i-- > 0;) {
      levels[i] = kCategories3[rest % kCategories3.size()];
      rest /= kCategories3.size();
    }
    out.emplace_back(std::move(levels));
  }
  return out;
}

PatternDataset assemble_rows(std::span<const JoinedHour> hours, Stream stream, const HolidayCalendars& holidays) {
  const auto bridges = bridges_for(stream.vehicle);
  struct Slot {
    std::vector<std::optional<double>> waits;
    const WeatherRecord* weather = nullptr;
  };
  std::map<CivilTime, Slot> by_hour;
  for (const auto& h : hours) {
    if (h.wait.vehicle != stream.vehicle || h.wait.direction != stream.direction) continue;
    auto pos = std::find(bridges.begin(), bridges.end(), h.wait.bridge);
    if (pos == bridges.end()) continue;
    auto& slot = by_hour[h.wait.hour_start];
    slot.waits.resize(bridges.size());
    slot.waits[static_cast<std::size_t>(pos - bridges.begin())] = h.wait.mean_wait_minutes;
    if (!slot.weather) slot.weather = &h.weather;
  }

  PatternDataset ds;
  ds.stream = stream;
  for (const auto& [hour, slot] : by_hour) {
    if (std::any_of(slot.waits.begin(), slot.waits.end(), [](const auto& w) { return !w.has_value(); })) {
      ++ds.skipped_incomplete;
      continue;
    }
    PatternRow row;
    row.hour_start = hour;
    for (const auto& w : slot.waits) row.waits.push_back(*w);
    if (std::all_of(row.waits.begin(), row.waits.end(), [](double w) { return w == 0.0; })) {
      ++ds.dropped_all_zero;
      continue;
    }
    std::vector<DelayCategory3> levels;
    for (double w : row.waits) levels.push_back(merge(categorize(w)));
    row.pattern = DelayPattern(std::move(levels));
    row.features = make_feature_vector(hour, *slot.weather, holidays);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::vector<std::pair<DelayPattern, std::size_t>> pattern_frequencies(const PatternDataset& ds) {
  std::map<DelayPattern, std::size_t> counts;
  for (const auto& row : ds.rows) ++counts[row.pattern];
  std::vector<std::pair<DelayPattern, std::size_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first.label() < b.first.label();
  });
  return out;
}

TrainingSet to_training_set(const PatternDataset& ds) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  rows.reserve(ds.rows.size());
  labels.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    rows.push_back(encode(row.features));
    labels.push_back(row.pattern.label());
  }
  return TrainingSet::build(ds.schema(), std::move(rows), labels);
}

DelayPattern predict_pattern(const DecisionTree& tree, const FeatureVector& x) {
  if (tree.schema != observation_schema()) throw UsageError("tree was not trained on the observation schema");
  return DelayPattern::parse(tree.predict(encode(x)));
}

std::string write_observations(std::span<const PatternDataset> datasets) {
  std::ostringstream out;
  out << kObservationsHeader << '\n';
  for (const auto& ds : datasets) {
    const auto bridges = bridges_for(ds.stream.vehicle);
    for (const auto& row : ds.rows) {
      std::array<std::string, 3> waits;
      for (std::size_t i = 0; i < bridges.size(); ++i) waits[wait_column(bridges[i]) - 3] = format_double(row.waits[i]);
      out << format_civil_time(row.hour_start) << ',' << to_string(ds.stream.direction) << ','
          << to_string(ds.stream.vehicle) << ',' << waits[0] << ',' << waits[1] << ',' << waits[2] << ','
          << row.pattern.label();
      for (const auto& text : feature_texts(row.features)) out << ',' << text;
      out << '\n';
    }
  }
  return out.str();
}

std::vector<PatternDataset> read_observations(std::string_view text, const std::string& source) {
  CsvReader in(text, source);
  in.expect_header(kObservationsHeader);
  std::map<Stream, PatternDataset> by_stream;
  const std::size_t feature_count = observation_schema().size();
  while (in.next()) {
    in.require_fields(7 + feature_count);
    PatternRow row;
    auto hour = parse_civil_time(in.field(0));
    if (!hour) in.fail("malformed hour_start '" + std::string(in.field(0)) + "'");
    row.hour_start = *hour;
    auto direction = parse_direction(in.field(1));
    auto vehicle = parse_vehicle(in.field(2));
    if (!direction) in.fail("unknown direction '" + std::string(in.field(1)) + "'");
    if (!vehicle) in.fail("unknown vehicle '" + std::string(in.field(2)) + "'");
    Stream stream{*vehicle, *direction};
    for (Bridge b : kAllBridges) {
      std::string_view cell = in.field(wait_column(b));
      if (!carries(b, stream.vehicle)) {
        if (!cell.empty()) in.fail("commercial rows must leave wait_rb empty");
        continue;
      }
      auto w = parse_double(cell);
      if (!w || *w < 0) in.fail("invalid wait for " + std::string(to_string(b)));
      row.waits.push_back(*w);
    }
    try {
      row.pattern = DelayPattern::parse(in.field(6));
      if (row.pattern.size() != row.waits.size()) in.fail("pattern length does not match the vehicle's bridges");
      std::vector<std::string_view> texts(in.fields().begin() + 7, in.fields().end());
      row.features = parse_feature_texts(texts);
      if (row.features.hour_interval != hour_interval_of(row.hour_start.hour) ||
          row.features.month != row.hour_start.date.month) {
        in.fail("temporal features contradict hour_start");
      }
    } catch (const DataError& e) {
      if (e.line() > 0) throw;
      in.fail(e.reason());
    }
    auto& ds = by_stream[stream];
    ds.stream = stream;
    ds.rows.push_back(std::move(row));
  }
  std::vector<PatternDataset> out;
  for (Stream s : kAllStreams) {
    if (auto it = by_stream.find(s); it != by_stream.end()) out.push_back(std::move(it->second));
  }
  return out;
}

}  // namespace delaytree
