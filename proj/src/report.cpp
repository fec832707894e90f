#include "delaytree/report.hpp"

#include <algorithm>
#include <sstream>

#include "delaytree/text.hpp"

namespace delaytree {

HourlyDistribution hourly_distribution(std::span<const HourlyWait> hours, Bridge bridge, Stream stream) {
  HourlyDistribution dist;
  dist.bridge = bridge;
  dist.stream = stream;
  std::array<std::array<std::size_t, 4>, kReportHours> counts{};
  for (const auto& h : hours) {
    if (h.bridge != bridge || h.vehicle != stream.vehicle || h.direction != stream.direction) continue;
    int hour = h.hour_start.hour;
    if (hour < kFirstHour || hour > kLastHour) continue;
    auto slot = static_cast<std::size_t>(hour - kFirstHour);
    ++counts[slot][static_cast<std::size_t>(categorize(h.mean_wait_minutes))];
    ++dist.hours[slot].n;
  }
  for (std::size_t i = 0; i < kReportHours; ++i) {
    auto& hour = dist.hours[i];
    if (hour.n == 0) continue;
    for (std::size_t c = 0; c < 4; ++c) hour.share[c] = static_cast<double>(counts[i][c]) / static_cast<double>(hour.n);
  }
  return dist;
}

HourlyDistribution hourly_distribution(std::span<const JoinedHour> hours, Bridge bridge, Stream stream) {
  std::vector<HourlyWait> waits;
  waits.reserve(hours.size());
  for (const auto& h : hours) waits.push_back(h.wait);
  return hourly_distribution(waits, bridge, stream);
}

std::string write_hourly_distribution(std::span<const HourlyDistribution> dists) {
  std::ostringstream out;
  out << "bridge,direction,vehicle,hour,n,no_delay,slight_delay,delay,heavy_delay\n";
  for (const auto& d : dists) {
    for (std::size_t i = 0; i < kReportHours; ++i) {
      const auto& hour = d.hours[i];
      out << to_string(d.bridge) << ',' << to_string(d.stream.direction) << ',' << to_string(d.stream.vehicle) << ','
          << kFirstHour + static_cast<int>(i) << ',' << hour.n;
      for (double s : hour.share) out << ',' << (hour.n > 0 ? format_double(s) : "");
      out << '\n';
    }
  }
  return out.str();
}

std::string write_pattern_frequencies(std::span<const PatternDataset> datasets) {
  std::ostringstream out;
  out << "direction,vehicle,pattern,count,share\n";
  for (const auto& ds : datasets) {
    for (const auto& [pattern, count] : pattern_frequencies(ds)) {
      out << to_string(ds.stream.direction) << ',' << to_string(ds.stream.vehicle) << ',' << pattern.label() << ','
          << count << ',' << format_double(static_cast<double>(count) / static_cast<double>(ds.rows.size())) << '\n';
    }
  }
  return out.str();
}

std::vector<FactorSummary> factor_summary(const std::map<Stream, DecisionTree>& trees) {
  std::vector<FactorSummary> out;
  for (const auto& [stream, tree] : trees) {
    FactorSummary s;
    s.stream = stream;
    s.factors = internal_features(tree);
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      const auto& node = tree.nodes[id];
      if (node.is_leaf()) s.leaves.push_back({tree.classes[node.label], node.distribution.total, id});
    }
    std::sort(s.leaves.begin(), s.leaves.end(), [](const FactorSummary::Leaf& a, const FactorSummary::Leaf& b) {
      if (a.samples != b.samples) return a.samples > b.samples;
      if (a.pattern != b.pattern) return a.pattern < b.pattern;
      return a.node < b.node;
    });
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_factor_summary(std::span<const FactorSummary> summaries) {
  std::ostringstream out;
  out << "vehicle,direction,influential_factors,leaf_patterns\n";
  for (const auto& s : summaries) {
    out << to_string(s.stream.vehicle) << ',' << to_string(s.stream.direction) << ',';
    for (std::size_t i = 0; i < s.factors.size(); ++i) out << (i ? ";" : "") << s.factors[i];
    out << ',';
    for (std::size_t i = 0; i < s.leaves.size(); ++i) {
      out << (i ? ";" : "") << s.leaves[i].pattern << " (" << s.leaves[i].samples << ")";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace delaytree
