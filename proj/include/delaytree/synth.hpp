#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delaytree/cart.hpp"
#include "delaytree/civil_time.hpp"
#include "delaytree/features.hpp"
#include "delaytree/ingest.hpp"
#include "delaytree/patterns.hpp"

namespace delaytree {

// Portable seeded source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; uniforms take the top 53 bits and
// normals use the Box-Muller transform, so streams do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  double uniform();                     // [0, 1)
  double normal();                      // mean 0, sd 1
  std::size_t below(std::size_t n);     // [0, n)

 private:
  std::mt19937_64 engine_;
};

// Conjunction of feature tests over a FeatureVector, written like
// "weekend=1 & hour_interval=Evening" or "temperature_f>=79". Categorical
// features accept = / != against a level name; continuous features also
// accept <, <=, >, >=. The text "always" matches every hour.
class Condition {
 public:
  struct Term {
    enum class Op { eq, ne, lt, le, gt, ge };
    std::size_t feature = 0;
    Op op = Op::eq;
    double value = 0.0;  // level index for categorical features
  };

  Condition() = default;
  // Throws UsageError on unknown features, levels or operators.
  static Condition parse(std::string_view text);

  bool matches(const FeatureVector& fv) const;
  const std::vector<Term>& terms() const noexcept { return terms_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::vector<Term> terms_;
  std::string text_ = "always";
};

struct PlantedRule {
  Stream stream;
  Condition condition;
  DelayPattern target;
  // Additive wait shift in minutes, indexed by Bridge.
  std::array<double, 3> shift{};
};

struct SynthConfig {
  CivilDate first_day;
  CivilDate last_day;
  std::uint64_t seed = 42;
  // Base wait in minutes, indexed by Bridge; streams absent here use
  // kDefaultBaseWait on every bridge.
  std::map<Stream, std::array<double, 3>> base_wait;
  std::vector<PlantedRule> rules;  // first matching rule wins
  double flip_probability = 0.0;
  double jitter_sd = 0.0;
  std::vector<Stream> streams{kAllStreams.begin(), kAllStreams.end()};
  HolidayCalendars holidays;

  static constexpr double kDefaultBaseWait = 8.0;

  double base(Stream s, Bridge b) const;

  // Throws UsageError: empty date range, flip probability outside [0,1),
  // negative jitter or base, a rule whose target length does not match its
  // stream, or a rule whose base + shift does not land on its target.
  void validate() const;
};

struct Emission {
  CivilTime hour_start;
  Stream stream;
  DelayPattern intended;  // what the generator aimed the hour's waits at
  bool flipped = false;   // intended differs from the rule (or default) target
};

struct SynthOutput {
  std::string wait_times_csv;
  std::string weather_csv;
  std::string emission_log_csv;
  std::vector<Emission> emissions;
};

// Representative waits used when an hour's label is flipped, per merged
// category: middle of (0,15], middle of (15,30], and 45 minutes.
double representative_wait(DelayCategory3 c);

// Hours 7..21 of every day in the range. PB and LQ get a sample every five
// minutes, RB one sample on the hour. A pure function of the config.
SynthOutput generate(const SynthConfig& config);

inline constexpr std::string_view kEmissionLogHeader = "hour_start,intended_pattern,flipped,direction,vehicle";

// Largest input brute_force_best_split accepts.
inline constexpr std::size_t kBruteForceMaxRows = 10'000;

// Reference split search: builds every candidate rule independently, routes
// each row through it, and scores the partition with label-keyed class
// counts. Selects the maximum gain (1e-12 tolerance) with the learner's
// tie-break order. Throws UsageError above kBruteForceMaxRows.
std::optional<SplitCandidate> brute_force_best_split(const TrainingSet& set, std::span<const std::size_t> members);

}  // namespace delaytree
