#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "delaytree/cart.hpp"
#include "delaytree/ingest.hpp"
#include "delaytree/patterns.hpp"
#include "delaytree/synth.hpp"
#include "delaytree/text.hpp"

namespace delaytree::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(DELAYTREE_FIXTURES) / name;
}

inline std::string fixture(const std::string& name) { return read_file(fixture_path(name)); }

// Small mixed-type dataset: 1..max_features features (continuous on a coarse
// grid so ties happen, or categorical with 2..5 declared levels), 2..3
// classes, 1..max_rows rows. Labels lean on the first feature so trees grow.
inline TrainingSet random_training_set(Rng& rng, std::size_t max_rows = 200, std::size_t max_features = 4) {
  const std::size_t nf = 1 + rng.below(max_features);
  std::vector<FeatureSpec> specs;
  for (std::size_t f = 0; f < nf; ++f) {
    FeatureSpec s{"f" + std::to_string(f), FeatureKind::continuous, {}};
    if (rng.below(2) == 0) {
      s.kind = FeatureKind::categorical;
      const std::size_t k = 2 + rng.below(4);
      for (std::size_t l = 0; l < k; ++l) s.levels.push_back("l" + std::to_string(l));
    }
    specs.push_back(std::move(s));
  }
  const std::size_t nc = 2 + rng.below(2);
  const std::size_t n = 1 + rng.below(max_rows);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x;
    for (const auto& s : specs) {
      x.push_back(s.kind == FeatureKind::categorical ? static_cast<double>(rng.below(s.levels.size()))
                                                     : static_cast<double>(rng.below(12)) * 0.5 - 1.0);
    }
    std::size_t cls = rng.uniform() < 0.5 ? static_cast<std::size_t>(x[0]) % nc : rng.below(nc);
    labels.push_back(std::string(1, static_cast<char>('a' + cls)));
    rows.push_back(std::move(x));
  }
  return TrainingSet::build(FeatureSchema(std::move(specs)), std::move(rows), labels);
}

// Runs the generator and the ingest chain, returning the assembled rows of
// one stream.
inline PatternDataset synth_dataset(const SynthConfig& cfg, Stream stream) {
  const auto out = generate(cfg);
  const auto hours = join_weather(aggregate_hourly(parse_wait_times(out.wait_times_csv, "synth")),
                                  parse_weather(out.weather_csv, "synth"));
  return assemble_rows(hours, stream, cfg.holidays);
}

inline PlantedRule planted(Stream stream, const std::string& condition, const std::string& target,
                           std::array<double, 3> shift) {
  return {stream, Condition::parse(condition), DelayPattern::parse(target), shift};
}

}  // namespace delaytree::testing
