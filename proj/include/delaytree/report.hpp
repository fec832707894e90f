#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "delaytree/cart.hpp"
#include "delaytree/ingest.hpp"
#include "delaytree/patterns.hpp"

namespace delaytree {

inline constexpr std::size_t kReportHours = kLastHour - kFirstHour + 1;

// Share of each four-level delay category per clock hour, computed on the
// hourly means before any filtering or merging.
struct HourlyDistribution {
  struct Hour {
    std::size_t n = 0;                 // hourly observations; 0 = no data
    std::array<double, 4> share{};     // indexed by DelayCategory4
  };

  Bridge bridge = Bridge::PB;
  Stream stream;
  std::array<Hour, kReportHours> hours{};  // hours[0] is 7:00

  const Hour& at(int hour) const { return hours.at(static_cast<std::size_t>(hour - kFirstHour)); }
};

HourlyDistribution hourly_distribution(std::span<const HourlyWait> hours, Bridge bridge, Stream stream);
HourlyDistribution hourly_distribution(std::span<const JoinedHour> hours, Bridge bridge, Stream stream);

// bridge,direction,vehicle,hour,n,no_delay,slight_delay,delay,heavy_delay;
// share cells are empty for hours without data.
std::string write_hourly_distribution(std::span<const HourlyDistribution> dists);

// direction,vehicle,pattern,count,share
std::string write_pattern_frequencies(std::span<const PatternDataset> datasets);

struct FactorSummary {
  struct Leaf {
    std::string pattern;
    std::size_t samples = 0;
    std::size_t node = 0;
  };

  Stream stream;
  std::vector<Leaf> leaves;          // descending samples, then label, then node id
  std::vector<std::string> factors;  // internal_features(tree)
};

std::vector<FactorSummary> factor_summary(const std::map<Stream, DecisionTree>& trees);

// vehicle,direction,influential_factors,leaf_patterns; lists are
// ';'-separated and leaf entries read "pattern (n)".
std::string write_factor_summary(std::span<const FactorSummary> summaries);

}  // namespace delaytree
