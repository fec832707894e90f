#include "delaytree/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "delaytree/error.hpp"
#include "delaytree/text.hpp"

namespace delaytree {

namespace {

std::size_t bridge_index(Bridge b) { return static_cast<std::size_t>(b); }

double round_to(double v, double step) { return std::round(v / step) * step; }

WeatherRecord draw_weather(Rng& rng, CivilTime hour) {
  WeatherRecord w;
  w.timestamp = hour;
  const auto ymd = std::chrono::year_month_day{hour.date.days()};
  const auto jan1 = std::chrono::sys_days{ymd.year() / std::chrono::January / 1};
  const double day_of_year = static_cast<double>((hour.date.days() - jan1).count());
  const double seasonal = 48.0 - 26.0 * std::cos(2.0 * std::numbers::pi * (day_of_year - 20.0) / 365.0);
  const double diurnal = 6.0 * std::sin(std::numbers::pi * (hour.hour - kFirstHour) / 14.0);
  w.temperature_f = round_to(seasonal + diurnal + 6.0 * rng.normal(), 0.1);

  const double u = rng.uniform();
  if (w.temperature_f <= 32.0 && u < 0.25) {
    w.condition = WeatherCondition::Snow;
  } else if (u < 0.15 || (w.temperature_f <= 32.0 && u < 0.30)) {
    w.condition = WeatherCondition::Rain;
  } else {
    w.condition = WeatherCondition::Clear;
  }
  switch (w.condition) {
    case WeatherCondition::Clear:
      w.precipitation_in = 0.0;
      w.visibility = 8 + static_cast<int>(rng.below(3));
      break;
    case WeatherCondition::Rain:
      w.precipitation_in = round_to(0.01 + 0.3 * rng.uniform(), 0.01);
      w.visibility = 4 + static_cast<int>(rng.below(4));
      break;
    case WeatherCondition::Snow:
      w.precipitation_in = round_to(0.01 + 0.3 * rng.uniform(), 0.01);
      w.visibility = 1 + static_cast<int>(rng.below(5));
      break;
  }
  return w;
}

DelayPattern pattern_of_waits(std::span<const Bridge> bridges, const std::array<double, 3>& waits) {
  std::vector<DelayCategory3> levels;
  for (Bridge b : bridges) levels.push_back(merge(categorize(waits[bridge_index(b)])));
  return DelayPattern(std::move(levels));
}

// Label-keyed class counts, deliberately independent of ClassDistribution.
using LabelCounts = std::map<std::string, std::size_t>;

double gini_of(const LabelCounts& counts, std::size_t n) {
  double sum = 0.0;
  for (const auto& [label, c] : counts) {
    double p = static_cast<double>(c) / static_cast<double>(n);
    sum += p * p;
  }
  return 1.0 - sum;
}

ClassDistribution to_distribution(const TrainingSet& set, const LabelCounts& counts) {
  ClassDistribution d(set.classes.size());
  for (const auto& [label, c] : counts) {
    auto it = std::find(set.classes.begin(), set.classes.end(), label);
    d.add(static_cast<std::size_t>(it - set.classes.begin()), c);
  }
  return d;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // 1 - uniform() lies in (0, 1], keeping the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw UsageError("Rng::below(0)");
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

Condition Condition::parse(std::string_view text) {
  Condition cond;
  text = trim(text);
  if (text.empty() || text == "always") return cond;
  cond.text_ = std::string(text);
  const auto& schema = observation_schema();
  for (auto part : split(text, '&')) {
    part = trim(part);
    static constexpr std::array<std::pair<std::string_view, Term::Op>, 7> kOps{{{"<=", Term::Op::le},
                                                                                {">=", Term::Op::ge},
                                                                                {"!=", Term::Op::ne},
                                                                                {"==", Term::Op::eq},
                                                                                {"<", Term::Op::lt},
                                                                                {">", Term::Op::gt},
                                                                                {"=", Term::Op::eq}}};
    std::size_t pos = std::string_view::npos;
    std::string_view op_text;
    Term term;
    for (const auto& [sym, op] : kOps) {
      pos = part.find(sym);
      if (pos != std::string_view::npos) {
        op_text = sym;
        term.op = op;
        break;
      }
    }
    if (pos == std::string_view::npos) throw UsageError("condition term '" + std::string(part) + "' has no operator");
    auto name = trim(part.substr(0, pos));
    auto value = trim(part.substr(pos + op_text.size()));
    auto feature = schema.index_of(name);
    if (!feature) throw UsageError("unknown feature '" + std::string(name) + "' in condition");
    term.feature = *feature;
    if (schema[*feature].kind == FeatureKind::categorical) {
      if (term.op != Term::Op::eq && term.op != Term::Op::ne) {
        throw UsageError("categorical feature '" + std::string(name) + "' only supports = and !=");
      }
      auto level = schema.level_index(*feature, value);
      if (!level) throw UsageError("unknown level '" + std::string(value) + "' for " + std::string(name));
      term.value = static_cast<double>(*level);
    } else {
      auto number = parse_double(value);
      if (!number) throw UsageError("condition value '" + std::string(value) + "' is not a number");
      term.value = *number;
    }
    cond.terms_.push_back(term);
  }
  return cond;
}

bool Condition::matches(const FeatureVector& fv) const {
  if (terms_.empty()) return true;
  const auto x = encode(fv);
  return std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) {
    const double v = x[t.feature];
    switch (t.op) {
      case Term::Op::eq: return v == t.value;
      case Term::Op::ne: return v != t.value;
      case Term::Op::lt: return v < t.value;
      case Term::Op::le: return v <= t.value;
      case Term::Op::gt: return v > t.value;
      case Term::Op::ge: return v >= t.value;
    }
    return false;
  });
}

double SynthConfig::base(Stream s, Bridge b) const {
  auto it = base_wait.find(s);
  return it == base_wait.end() ? kDefaultBaseWait : it->second[bridge_index(b)];
}

void SynthConfig::validate() const {
  if (last_day < first_day) throw UsageError("empty date range: end precedes start");
  if (!(flip_probability >= 0.0 && flip_probability < 1.0)) throw UsageError("flip probability must be in [0, 1)");
  if (!std::isfinite(jitter_sd) || jitter_sd < 0.0) throw UsageError("jitter must be a non-negative number");
  if (streams.empty()) throw UsageError("no streams to generate");
  for (const auto& [stream, waits] : base_wait) {
    for (Bridge b : bridges_for(stream.vehicle)) {
      double w = waits[bridge_index(b)];
      if (!std::isfinite(w) || w < 0) throw UsageError("base waits must be non-negative");
    }
  }
  for (const auto& rule : rules) {
    const auto bridges = bridges_for(rule.stream.vehicle);
    if (rule.target.size() != bridges.size()) {
      throw UsageError("rule target '" + rule.target.label() + "' does not match the bridges of " +
                       stream_name(rule.stream));
    }
    std::array<double, 3> shifted{};
    for (Bridge b : bridges) {
      shifted[bridge_index(b)] = base(rule.stream, b) + rule.shift[bridge_index(b)];
      if (shifted[bridge_index(b)] < 0) throw UsageError("rule shift drives a wait below zero");
    }
    if (pattern_of_waits(bridges, shifted) != rule.target) {
      throw UsageError("rule '" + rule.condition.text() + "': base + shift gives '" +
                       pattern_of_waits(bridges, shifted).label() + "', not the target '" + rule.target.label() + "'");
    }
  }
}

double representative_wait(DelayCategory3 c) {
  switch (c) {
    case DelayCategory3::slight_delay: return 7.5;
    case DelayCategory3::delay: return 22.5;
    case DelayCategory3::heavy_delay: return 45.0;
  }
  return 7.5;
}

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SynthOutput out;
  std::vector<RawWaitTimeRecord> waits;
  std::vector<WeatherRecord> weather;

  for (CivilDate day = config.first_day; day <= config.last_day; day = day.plus_days(1)) {
    for (int hour = kFirstHour; hour <= kLastHour; ++hour) {
      const CivilTime start{day, hour, 0};
      const WeatherRecord w = draw_weather(rng, start);
      weather.push_back(w);
      const FeatureVector fv = make_feature_vector(start, w, config.holidays);

      std::vector<RawWaitTimeRecord> hour_records;
      for (Stream stream : config.streams) {
        const auto bridges = bridges_for(stream.vehicle);
        const PlantedRule* rule = nullptr;
        for (const auto& r : config.rules) {
          if (r.stream == stream && r.condition.matches(fv)) {
            rule = &r;
            break;
          }
        }
        std::array<double, 3> centers{};
        for (Bridge b : bridges) {
          centers[bridge_index(b)] = config.base(stream, b) + (rule ? rule->shift[bridge_index(b)] : 0.0);
        }
        const DelayPattern target = rule ? rule->target : pattern_of_waits(bridges, centers);

        Emission emission{start, stream, target, false};
        if (config.flip_probability > 0.0 && rng.uniform() < config.flip_probability) {
          std::vector<DelayPattern> others;
          for (auto& p : enumerate_patterns(bridges.size())) {
            if (p != target) others.push_back(std::move(p));
          }
          emission.intended = others[rng.below(others.size())];
          emission.flipped = true;
          for (std::size_t i = 0; i < bridges.size(); ++i) {
            centers[bridge_index(bridges[i])] = representative_wait(emission.intended.levels()[i]);
          }
        }
        out.emissions.push_back(emission);

        for (Bridge b : bridges) {
          const int samples = b == Bridge::RB ? 1 : 12;
          for (int s = 0; s < samples; ++s) {
            double value = centers[bridge_index(b)];
            if (config.jitter_sd > 0.0) value = std::max(0.0, value + config.jitter_sd * rng.normal());
            hour_records.push_back({{day, hour, 5 * s}, b, stream.direction, stream.vehicle, round_to(value, 0.01)});
          }
        }
      }
      std::stable_sort(hour_records.begin(), hour_records.end(),
                       [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
      waits.insert(waits.end(), hour_records.begin(), hour_records.end());
    }
  }

  out.wait_times_csv = write_wait_times(waits);
  out.weather_csv = write_weather(weather);
  std::ostringstream log;
  log << kEmissionLogHeader << '\n';
  for (const auto& e : out.emissions) {
    log << format_civil_time(e.hour_start) << ',' << e.intended.label() << ',' << (e.flipped ? 1 : 0) << ','
        << to_string(e.stream.direction) << ',' << to_string(e.stream.vehicle) << '\n';
  }
  out.emission_log_csv = log.str();
  return out;
}

std::optional<SplitCandidate> brute_force_best_split(const TrainingSet& set, std::span<const std::size_t> members) {
  if (members.size() > kBruteForceMaxRows) {
    throw UsageError("brute-force split search is limited to " + std::to_string(kBruteForceMaxRows) + " rows");
  }
  if (members.empty()) return std::nullopt;

  LabelCounts parent;
  for (std::size_t r : members) ++parent[set.classes[set.labels[r]]];
  const std::size_t n = members.size();
  const double parent_gini = gini_of(parent, n);

  struct Scored {
    SplitRule rule;
    double gain;
    LabelCounts left;
    LabelCounts right;
  };
  std::vector<Scored> scored;  // canonical order: feature, then rule

  auto score = [&](SplitRule rule, auto&& goes_left) {
    LabelCounts left;
    LabelCounts right;
    std::size_t nl = 0;
    for (std::size_t r : members) {
      if (goes_left(set.rows[r][rule.feature])) {
        ++left[set.classes[set.labels[r]]];
        ++nl;
      } else {
        ++right[set.classes[set.labels[r]]];
      }
    }
    const std::size_t nr = n - nl;
    if (nl == 0 || nr == 0) return;
    double gain = parent_gini - static_cast<double>(nl) / static_cast<double>(n) * gini_of(left, nl) -
                  static_cast<double>(nr) / static_cast<double>(n) * gini_of(right, nr);
    scored.push_back({std::move(rule), gain, std::move(left), std::move(right)});
  };

  for (std::size_t f = 0; f < set.schema.size(); ++f) {
    if (set.schema[f].kind == FeatureKind::continuous) {
      std::set<double> distinct;
      for (std::size_t r : members) distinct.insert(set.rows[r][f]);
      std::vector<double> values(distinct.begin(), distinct.end());
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        double t = (values[i] + values[i + 1]) / 2.0;
        if (!(t < values[i + 1])) t = values[i];
        SplitRule rule;
        rule.feature = f;
        rule.kind = SplitRule::Kind::threshold;
        rule.threshold = t;
        score(rule, [t](double x) { return x <= t; });
      }
    } else {
      std::set<std::size_t> present_set;
      for (std::size_t r : members) present_set.insert(static_cast<std::size_t>(set.rows[r][f]));
      std::vector<std::size_t> present(present_set.begin(), present_set.end());
      const std::size_t k = present.size();
      if (k < 2) continue;
      std::vector<std::vector<std::size_t>> left_sets;
      for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << k); ++mask) {
        if ((mask >> (k - 1)) & 1U) continue;  // highest present level stays right
        std::vector<std::size_t> left;
        for (std::size_t i = 0; i < k; ++i) {
          if ((mask >> i) & 1U) left.push_back(present[i]);
        }
        left_sets.push_back(std::move(left));
      }
      std::sort(left_sets.begin(), left_sets.end());
      for (auto& left : left_sets) {
        SplitRule rule;
        rule.feature = f;
        rule.kind = SplitRule::Kind::subset;
        for (std::size_t level : present) {
          if (!std::binary_search(left.begin(), left.end(), level)) rule.right_levels.push_back(level);
        }
        rule.left_levels = left;
        score(rule, [&left](double x) {
          return std::binary_search(left.begin(), left.end(), static_cast<std::size_t>(x));
        });
      }
    }
  }

  constexpr double kTolerance = 1e-12;
  double best_gain = 0.0;
  for (const auto& s : scored) best_gain = std::max(best_gain, s.gain);
  if (best_gain <= kTolerance) return std::nullopt;
  for (auto& s : scored) {
    if (s.gain >= best_gain - kTolerance) {
      SplitCandidate c;
      c.rule = std::move(s.rule);
      c.gain = s.gain;
      c.left = to_distribution(set, s.left);
      c.right = to_distribution(set, s.right);
      return c;
    }
  }
  return std::nullopt;
}

}  // namespace delaytree
