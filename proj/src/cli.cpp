#include "delaytree/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <future>
#include <map>
#include <ostream>

#include "delaytree/error.hpp"
#include "delaytree/features.hpp"
#include "delaytree/ingest.hpp"
#include "delaytree/patterns.hpp"
#include "delaytree/report.hpp"
#include "delaytree/text.hpp"
#include "delaytree/tree_io.hpp"

namespace delaytree {

namespace {

namespace fs = std::filesystem;

enum class LogLevel { error = 0, info = 1, debug = 2 };

class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {
    if (const char* env = std::getenv("DELAYTREE_LOG")) {
      std::string v = to_lower(env);
      if (v == "info") level_ = LogLevel::info;
      if (v == "debug") level_ = LogLevel::debug;
    }
  }

  void info(const std::string& msg) const { emit(LogLevel::info, "info", msg); }
  void debug(const std::string& msg) const { emit(LogLevel::debug, "debug", msg); }

 private:
  void emit(LogLevel level, const char* tag, const std::string& msg) const {
    if (level <= level_) err_ << "[" << tag << "] " << msg << '\n';
  }

  std::ostream& err_;
  LogLevel level_ = LogLevel::error;
};

std::size_t to_size(const std::string& text, std::string_view what) {
  auto v = parse_int(trim(text));
  if (!v || *v < 0) throw UsageError(std::string(what) + " must be a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(*v);
}

double to_double(const std::string& text, std::string_view what) {
  auto v = parse_double(trim(text));
  if (!v) throw UsageError(std::string(what) + " must be a number, got '" + text + "'");
  return *v;
}

CivilDate to_date(const std::string& text, std::string_view what) {
  auto v = parse_date(trim(text));
  if (!v) throw UsageError(std::string(what) + " must be a YYYY-MM-DD date, got '" + text + "'");
  return *v;
}

std::uint64_t to_seed(const std::string& text) {
  std::uint64_t v = 0;
  auto t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw UsageError("seed must be an unsigned integer");
  return v;
}

std::vector<double> to_doubles(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(to_double(std::string(trim(part)), what));
  return out;
}

// A value given on the command line wins over the config file.
struct Setting {
  std::string value;
  CLI::Option* option = nullptr;
};

std::optional<std::string> pick(const Setting& flag, const ConfigFile& config, std::string_view section,
                                std::string_view key) {
  if (flag.option && flag.option->count() > 0) return flag.value;
  return config.get(section, key);
}

std::optional<fs::path> pick_path(const Setting& flag, const ConfigFile& config, std::string_view section,
                                  std::string_view key) {
  if (flag.option && flag.option->count() > 0) return fs::path(flag.value);
  if (auto v = config.get(section, key)) return config.resolve(*v);
  return std::nullopt;
}

fs::path require_path(const Setting& flag, const ConfigFile& config, std::string_view section,
                      std::string_view key, std::string_view flag_name) {
  auto p = pick_path(flag, config, section, key);
  if (!p) throw UsageError("missing " + std::string(flag_name));
  return *p;
}

HolidayCalendars load_holidays(const std::vector<fs::path>& paths) {
  HolidayCalendars calendars;
  for (const auto& p : paths) parse_holidays(read_file(p), calendars, p.string());
  return calendars;
}

std::vector<fs::path> holiday_paths(const std::vector<std::string>& flags, const ConfigFile& config,
                                    std::string_view section) {
  std::vector<fs::path> out;
  if (!flags.empty()) {
    out.assign(flags.begin(), flags.end());
  } else {
    for (const auto& v : config.get_all(section, "holidays")) out.push_back(config.resolve(v));
  }
  return out;
}

struct IngestResult {
  std::vector<HourlyWait> hourly;
  std::vector<JoinedHour> joined;
  std::vector<PatternDataset> datasets;  // kAllStreams order
};

IngestResult ingest_files(const fs::path& wait_times, const fs::path& weather, const HolidayCalendars& holidays,
                          const Log& log) {
  IngestResult result;
  auto records = parse_wait_times(read_file(wait_times), wait_times.string());
  auto weather_records = parse_weather(read_file(weather), weather.string());
  result.hourly = aggregate_hourly(records);
  result.joined = join_weather(result.hourly, weather_records);
  log.info("aggregated " + std::to_string(records.size()) + " wait samples into " +
           std::to_string(result.hourly.size()) + " hourly rows");
  for (Stream s : kAllStreams) {
    auto ds = assemble_rows(result.joined, s, holidays);
    log.info(stream_name(s) + ": " + std::to_string(ds.rows.size()) + " rows kept, " +
             std::to_string(ds.dropped_all_zero) + " all-zero hours dropped, " +
             std::to_string(ds.skipped_incomplete) + " incomplete hours skipped");
    result.datasets.push_back(std::move(ds));
  }
  return result;
}

DecisionTree train_stream(const PatternDataset& ds, const TrainConfig& config) {
  DecisionTree tree = grow_tree(to_training_set(ds), config);
  tree.metadata["vehicle"] = std::string(to_string(ds.stream.vehicle));
  tree.metadata["direction"] = std::string(to_string(ds.stream.direction));
  tree.metadata["min_samples"] = std::to_string(config.min_samples);
  tree.metadata["min_gain"] = format_double(config.min_gain);
  if (config.max_depth) tree.metadata["max_depth"] = std::to_string(*config.max_depth);
  return tree;
}

// Trains independent streams concurrently; results keep the input order.
std::vector<DecisionTree> train_all(const std::vector<const PatternDataset*>& datasets,
                                    const std::vector<TrainConfig>& configs) {
  std::vector<std::future<DecisionTree>> jobs;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, train_stream, std::cref(*datasets[i]), configs[i]));
  }
  std::vector<DecisionTree> trees;
  for (auto& j : jobs) trees.push_back(j.get());
  return trees;
}

void emit(const std::optional<fs::path>& out_path, std::string_view content, std::ostream& out, const Log& log) {
  if (!out_path) {
    out << content;
    return;
  }
  write_file(*out_path, content);
  log.info("wrote " + out_path->string());
}

std::optional<Stream> stream_filter(const std::optional<std::string>& vehicle, const std::optional<std::string>& direction,
                                    std::vector<Stream>& selected) {
  std::optional<Vehicle> v;
  std::optional<Direction> d;
  if (vehicle) {
    v = parse_vehicle(*vehicle);
    if (!v) throw UsageError("unknown vehicle '" + *vehicle + "'");
  }
  if (direction) {
    d = parse_direction(*direction);
    if (!d) throw UsageError("unknown direction '" + *direction + "'");
  }
  for (Stream s : kAllStreams) {
    if ((!v || s.vehicle == *v) && (!d || s.direction == *d)) selected.push_back(s);
  }
  if (v && d) return Stream{*v, *d};
  return std::nullopt;
}

// ---- subcommands -----------------------------------------------------------

struct Common {
  // Every subcommand registers its own --config option into `config`.
  std::string config;
  std::vector<CLI::Option*> options;
  ConfigFile file;

  bool given() const {
    return std::any_of(options.begin(), options.end(), [](const CLI::Option* o) { return o->count() > 0; });
  }
  void load() {
    if (given()) file = ConfigFile::load(config);
  }
};

struct SynthArgs {
  Setting start, end, seed, flip, jitter, out_dir;
  std::vector<std::string> holidays;
};

int run_synth(Common& common, const SynthArgs& a, const Log& log) {
  const auto& cfg = common.file;
  SynthConfig config = synth_config_from(cfg);
  if (auto v = pick(a.start, cfg, "synth", "start")) config.first_day = to_date(*v, "start");
  if (auto v = pick(a.end, cfg, "synth", "end")) config.last_day = to_date(*v, "end");
  if (auto v = pick(a.seed, cfg, "synth", "seed")) config.seed = to_seed(*v);
  if (auto v = pick(a.flip, cfg, "synth", "flip_probability")) config.flip_probability = to_double(*v, "flip probability");
  if (auto v = pick(a.jitter, cfg, "synth", "jitter")) config.jitter_sd = to_double(*v, "jitter");
  if (!a.holidays.empty()) {
    std::vector<fs::path> paths(a.holidays.begin(), a.holidays.end());
    config.holidays = load_holidays(paths);
  }
  const fs::path out_dir = require_path(a.out_dir, cfg, "synth", "out_dir", "--out-dir");
  SynthOutput output = generate(config);
  write_file(out_dir / "wait_times.csv", output.wait_times_csv);
  write_file(out_dir / "weather.csv", output.weather_csv);
  write_file(out_dir / "emission_log.csv", output.emission_log_csv);
  log.info("generated " + std::to_string(output.emissions.size()) + " stream-hours into " + out_dir.string());
  return kExitOk;
}

struct IngestArgs {
  Setting wait_times, weather, out;
  std::vector<std::string> holidays;
};

int run_ingest(Common& common, const IngestArgs& a, const Log& log) {
  const auto& cfg = common.file;
  auto wait_times = require_path(a.wait_times, cfg, "ingest", "wait_times", "--wait-times");
  auto weather = require_path(a.weather, cfg, "ingest", "weather", "--weather");
  auto out = require_path(a.out, cfg, "ingest", "out", "--out");
  auto holidays = load_holidays(holiday_paths(a.holidays, cfg, "ingest"));
  auto result = ingest_files(wait_times, weather, holidays, log);
  write_file(out, write_observations(result.datasets));
  log.info("wrote " + out.string());
  return kExitOk;
}

struct TrainArgs {
  Setting data, vehicle, direction, min_samples, min_gain, max_depth, out, out_dir;
};

TrainConfig apply_train_flags(TrainConfig config, const TrainArgs& a) {
  if (a.min_samples.option->count()) config.min_samples = to_size(a.min_samples.value, "min-samples");
  if (a.min_gain.option->count()) config.min_gain = to_double(a.min_gain.value, "min-gain");
  if (a.max_depth.option->count()) config.max_depth = to_size(a.max_depth.value, "max-depth");
  config.validate();
  return config;
}

int run_train(Common& common, const TrainArgs& a, const Log& log) {
  const auto& cfg = common.file;
  auto data = require_path(a.data, cfg, "train", "data", "--data");
  std::vector<Stream> selected;
  auto single = stream_filter(pick(a.vehicle, cfg, "train", "vehicle"), pick(a.direction, cfg, "train", "direction"),
                              selected);
  auto out = pick_path(a.out, cfg, "train", "out");
  auto out_dir = pick_path(a.out_dir, cfg, "train", "out_dir");
  if (!single && !out_dir) throw UsageError("--out-dir is required when training more than one stream");
  if (single && !out && !out_dir) throw UsageError("missing --out");

  // Validate flags before touching the data.
  std::vector<TrainConfig> configs;
  for (Stream s : selected) configs.push_back(apply_train_flags(train_config_from(cfg, s), a));

  auto datasets = read_observations(read_file(data), data.string());
  std::vector<const PatternDataset*> chosen;
  std::vector<TrainConfig> chosen_configs;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    auto it = std::find_if(datasets.begin(), datasets.end(), [&](const auto& d) { return d.stream == selected[i]; });
    if (it == datasets.end() || it->rows.empty()) {
      if (single) throw DataError(data.string(), 0, "no observations for " + stream_name(selected[i]));
      continue;
    }
    chosen.push_back(&*it);
    chosen_configs.push_back(configs[i]);
  }
  if (chosen.empty()) throw DataError(data.string(), 0, "no observations for the requested streams");

  auto trees = train_all(chosen, chosen_configs);
  for (std::size_t i = 0; i < trees.size(); ++i) {
    fs::path path = single && out ? *out : *out_dir / ("tree_" + stream_name(chosen[i]->stream) + ".json");
    write_file(path, export_tree(trees[i], TreeFormat::json));
    log.info("wrote " + path.string() + " (" + std::to_string(trees[i].nodes.size()) + " nodes)");
  }
  return kExitOk;
}

struct RenderArgs {
  Setting tree, format, out;
};

int run_render(Common& common, const RenderArgs& a, std::ostream& out, const Log& log) {
  const auto& cfg = common.file;
  TreeFormat format = parse_tree_format(pick(a.format, cfg, "render", "format").value_or("text"));
  auto tree_path = require_path(a.tree, cfg, "render", "tree", "--tree");
  DecisionTree tree = import_tree_json(read_file(tree_path));
  emit(pick_path(a.out, cfg, "render", "out"), export_tree(tree, format), out, log);
  return kExitOk;
}

struct ReportArgs {
  std::string kind;
  Setting data, wait_times, bridge, vehicle, direction, out;
  std::vector<std::string> trees;
};

int run_report(Common& common, const ReportArgs& a, std::ostream& out, const Log& log) {
  const auto& cfg = common.file;
  auto out_path = pick_path(a.out, cfg, "report", "out");
  std::vector<Stream> selected;
  stream_filter(pick(a.vehicle, cfg, "report", "vehicle"), pick(a.direction, cfg, "report", "direction"), selected);

  if (a.kind == "pattern-freq") {
    auto data = require_path(a.data, cfg, "report", "data", "--data");
    auto datasets = read_observations(read_file(data), data.string());
    std::erase_if(datasets, [&](const PatternDataset& d) {
      return std::find(selected.begin(), selected.end(), d.stream) == selected.end();
    });
    emit(out_path, write_pattern_frequencies(datasets), out, log);
  } else if (a.kind == "hourly-dist") {
    auto path = require_path(a.wait_times, cfg, "report", "wait_times", "--wait-times");
    auto hourly = aggregate_hourly(parse_wait_times(read_file(path), path.string()));
    std::optional<Bridge> only;
    if (auto b = pick(a.bridge, cfg, "report", "bridge")) {
      only = parse_bridge(*b);
      if (!only) throw UsageError("unknown bridge '" + *b + "'");
    }
    std::vector<HourlyDistribution> dists;
    for (Stream s : selected) {
      for (Bridge b : bridges_for(s.vehicle)) {
        if (!only || *only == b) dists.push_back(hourly_distribution(hourly, b, s));
      }
    }
    emit(out_path, write_hourly_distribution(dists), out, log);
  } else if (a.kind == "factors") {
    std::vector<fs::path> paths(a.trees.begin(), a.trees.end());
    if (paths.empty()) {
      for (const auto& v : cfg.get_all("report", "trees")) paths.push_back(cfg.resolve(v));
    }
    if (paths.empty()) throw UsageError("missing --trees");
    std::map<Stream, DecisionTree> trees;
    for (const auto& p : paths) {
      DecisionTree tree = import_tree_json(read_file(p));
      const auto v = parse_vehicle(tree.metadata["vehicle"]);
      const auto d = parse_direction(tree.metadata["direction"]);
      if (!v || !d) throw DataError(p.string(), 0, "tree has no vehicle/direction metadata");
      const Stream stream{*v, *d};
      if (!trees.emplace(stream, std::move(tree)).second) {
        throw UsageError("two trees given for " + stream_name(stream));
      }
    }
    emit(out_path, write_factor_summary(factor_summary(trees)), out, log);
  } else {
    throw UsageError("unknown report '" + a.kind + "' (expected pattern-freq, hourly-dist or factors)");
  }
  return kExitOk;
}

struct PipelineArgs {
  Setting out_dir, min_samples, min_gain, max_depth;
};

int run_pipeline(Common& common, const PipelineArgs& a, std::ostream& out, const Log& log) {
  if (!common.given()) throw UsageError("pipeline requires --config");
  const auto& cfg = common.file;
  const fs::path out_dir = require_path(a.out_dir, cfg, "pipeline", "out_dir", "--out-dir");

  auto wait_times = pick_path({}, cfg, "pipeline", "wait_times");
  auto weather = pick_path({}, cfg, "pipeline", "weather");
  auto holiday_files = holiday_paths({}, cfg, "pipeline");
  if (!wait_times || !weather) {
    if (!cfg.has_section("synth")) {
      throw UsageError("config needs [pipeline] wait_times and weather, or a [synth] section");
    }
    SynthConfig synth = synth_config_from(cfg);
    if (!cfg.get("synth", "holidays")) synth.holidays = load_holidays(holiday_files);
    SynthOutput generated = generate(synth);
    wait_times = out_dir / "input" / "wait_times.csv";
    weather = out_dir / "input" / "weather.csv";
    write_file(*wait_times, generated.wait_times_csv);
    write_file(*weather, generated.weather_csv);
    write_file(out_dir / "input" / "emission_log.csv", generated.emission_log_csv);
    log.info("generated synthetic inputs under " + (out_dir / "input").string());
  }

  auto result = ingest_files(*wait_times, *weather, load_holidays(holiday_files), log);
  write_file(out_dir / "observations.csv", write_observations(result.datasets));

  TrainArgs flags;
  flags.min_samples = a.min_samples;
  flags.min_gain = a.min_gain;
  flags.max_depth = a.max_depth;
  std::vector<const PatternDataset*> chosen;
  std::vector<TrainConfig> configs;
  for (const auto& ds : result.datasets) {
    if (ds.rows.empty()) {
      log.info("skipping " + stream_name(ds.stream) + ": no observations");
      continue;
    }
    chosen.push_back(&ds);
    configs.push_back(apply_train_flags(train_config_from(cfg, ds.stream), flags));
  }
  if (chosen.empty()) throw DataError("no observations in any stream");
  auto trees = train_all(chosen, configs);

  std::map<Stream, DecisionTree> by_stream;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const std::string stem = "tree_" + stream_name(chosen[i]->stream);
    write_file(out_dir / "trees" / (stem + ".json"), export_tree(trees[i], TreeFormat::json));
    write_file(out_dir / "trees" / (stem + ".dot"), export_tree(trees[i], TreeFormat::dot));
    write_file(out_dir / "trees" / (stem + ".txt"), export_tree(trees[i], TreeFormat::text));
    by_stream.emplace(chosen[i]->stream, std::move(trees[i]));
  }

  std::vector<HourlyDistribution> dists;
  for (Stream s : kAllStreams) {
    for (Bridge b : bridges_for(s.vehicle)) dists.push_back(hourly_distribution(result.hourly, b, s));
  }
  write_file(out_dir / "reports" / "pattern_frequencies.csv", write_pattern_frequencies(result.datasets));
  write_file(out_dir / "reports" / "hourly_distribution.csv", write_hourly_distribution(dists));
  auto summaries = factor_summary(by_stream);
  write_file(out_dir / "reports" / "factors.csv", write_factor_summary(summaries));

  for (const auto& s : summaries) {
    out << stream_name(s.stream) << ": " << s.leaves.size() << " leaves; factors:";
    for (const auto& f : s.factors) out << ' ' << f;
    out << '\n';
  }
  return kExitOk;
}

void add_setting(CLI::App* app, const std::string& name, Setting& s, const std::string& help) {
  s.option = app->add_option(name, s.value, help);
}

}  // namespace

Stream parse_stream(std::string_view text) {
  text = trim(text);
  for (Stream s : kAllStreams) {
    const std::string v(to_string(s.vehicle));
    const std::string d(to_string(s.direction));
    for (char sep : {'.', '_', '/'}) {
      if (iequals(text, v + sep + d)) return s;
    }
  }
  throw UsageError("unknown stream '" + std::string(text) + "' (expected e.g. passenger.to_us)");
}

SynthConfig synth_config_from(const ConfigFile& config) {
  SynthConfig out;
  out.first_day = to_date(config.get("synth", "start").value_or("2016-08-22"), "start");
  out.last_day = to_date(config.get("synth", "end").value_or(format_date(out.first_day)), "end");
  if (auto v = config.get("synth", "seed")) out.seed = to_seed(*v);
  if (auto v = config.get("synth", "flip_probability")) out.flip_probability = to_double(*v, "flip_probability");
  if (auto v = config.get("synth", "jitter")) out.jitter_sd = to_double(*v, "jitter");
  if (auto v = config.get("synth", "streams")) {
    out.streams.clear();
    for (auto part : split(*v, ',')) out.streams.push_back(parse_stream(part));
  }
  for (const auto& [key, value] : config.entries("synth")) {
    if (!key.starts_with("base.")) continue;
    Stream s = parse_stream(std::string_view(key).substr(5));
    auto waits = to_doubles(value, key);
    auto bridges = bridges_for(s.vehicle);
    if (waits.size() != bridges.size()) {
      throw UsageError(key + " needs one wait per bridge (" + std::to_string(bridges.size()) + ")");
    }
    std::array<double, 3> by_bridge{};
    for (std::size_t i = 0; i < bridges.size(); ++i) by_bridge[static_cast<std::size_t>(bridges[i])] = waits[i];
    out.base_wait[s] = by_bridge;
  }
  for (const auto& text : config.get_all("synth", "rule")) {
    auto parts = split(text, '|');
    if (parts.size() != 4) throw UsageError("rule must read 'stream | condition | target pattern | shifts': " + text);
    PlantedRule rule;
    rule.stream = parse_stream(parts[0]);
    rule.condition = Condition::parse(parts[1]);
    try {
      rule.target = DelayPattern::parse(trim(parts[2]));
    } catch (const DataError& e) {
      throw UsageError(e.reason());
    }
    auto shifts = to_doubles(parts[3], "rule shift");
    auto bridges = bridges_for(rule.stream.vehicle);
    if (shifts.size() != bridges.size()) throw UsageError("rule needs one shift per bridge: " + text);
    for (std::size_t i = 0; i < bridges.size(); ++i) rule.shift[static_cast<std::size_t>(bridges[i])] = shifts[i];
    out.rules.push_back(std::move(rule));
  }
  std::vector<fs::path> holidays;
  for (const auto& v : config.get_all("synth", "holidays")) holidays.push_back(config.resolve(v));
  out.holidays = load_holidays(holidays);
  return out;
}

TrainConfig train_config_from(const ConfigFile& config, Stream stream) {
  TrainConfig out;
  const std::string specific = "train." + std::string(to_string(stream.vehicle)) + "." +
                               std::string(to_string(stream.direction));
  for (const std::string& section : {std::string("train"), specific}) {
    if (auto v = config.get(section, "min_samples")) out.min_samples = to_size(*v, "min_samples");
    if (auto v = config.get(section, "min_gain")) out.min_gain = to_double(*v, "min_gain");
    if (auto v = config.get(section, "max_depth")) out.max_depth = to_size(*v, "max_depth");
  }
  out.validate();
  return out;
}

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  const Log log(err);
  CLI::App app{"Border-crossing delay pattern analysis with CART decision trees", "delaytree"};
  app.require_subcommand(1);

  Common common;
  auto add_config = [&](CLI::App* sub) {
    common.options.push_back(sub->add_option("--config", common.config, "key = value config file"));
  };

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic wait-time and weather files");
  add_config(synth_cmd);
  add_setting(synth_cmd, "--start", synth.start, "First day (YYYY-MM-DD)");
  add_setting(synth_cmd, "--end", synth.end, "Last day (YYYY-MM-DD)");
  add_setting(synth_cmd, "--seed", synth.seed, "Random seed");
  add_setting(synth_cmd, "--flip", synth.flip, "Label flip probability");
  add_setting(synth_cmd, "--jitter", synth.jitter, "Wait jitter standard deviation (minutes)");
  add_setting(synth_cmd, "--out-dir", synth.out_dir, "Output directory");
  synth_cmd->add_option("--holidays", synth.holidays, "Holiday CSV files");

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Raw files to observations.csv");
  add_config(ingest_cmd);
  add_setting(ingest_cmd, "--wait-times", ingest.wait_times, "wait_times.csv");
  add_setting(ingest_cmd, "--weather", ingest.weather, "weather.csv");
  add_setting(ingest_cmd, "--out", ingest.out, "Output observations.csv");
  ingest_cmd->add_option("--holidays", ingest.holidays, "Holiday CSV files");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Grow decision trees from observations.csv");
  add_config(train_cmd);
  add_setting(train_cmd, "--data", train.data, "observations.csv");
  add_setting(train_cmd, "--vehicle", train.vehicle, "passenger | commercial");
  add_setting(train_cmd, "--direction", train.direction, "to_us | to_can");
  add_setting(train_cmd, "--min-samples", train.min_samples, "Minimum rows to split a node (default 100)");
  add_setting(train_cmd, "--min-gain", train.min_gain, "Minimum information gain (default 0.005)");
  add_setting(train_cmd, "--max-depth", train.max_depth, "Maximum depth (default unlimited)");
  add_setting(train_cmd, "--out", train.out, "Tree JSON for a single stream");
  add_setting(train_cmd, "--out-dir", train.out_dir, "Directory for one tree per stream");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render a tree as json, dot or text");
  add_config(render_cmd);
  add_setting(render_cmd, "--tree", render.tree, "Tree JSON");
  add_setting(render_cmd, "--format", render.format, "json | dot | text");
  add_setting(render_cmd, "--out", render.out, "Output file (default stdout)");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "pattern-freq | hourly-dist | factors");
  add_config(report_cmd);
  report_cmd->add_option("kind", report.kind, "pattern-freq | hourly-dist | factors")->required();
  add_setting(report_cmd, "--data", report.data, "observations.csv (pattern-freq)");
  add_setting(report_cmd, "--wait-times", report.wait_times, "wait_times.csv (hourly-dist)");
  add_setting(report_cmd, "--bridge", report.bridge, "PB | RB | LQ (hourly-dist)");
  add_setting(report_cmd, "--vehicle", report.vehicle, "Filter by vehicle");
  add_setting(report_cmd, "--direction", report.direction, "Filter by direction");
  report_cmd->add_option("--trees", report.trees, "Tree JSON files (factors)");
  add_setting(report_cmd, "--out", report.out, "Output CSV (default stdout)");

  PipelineArgs pipeline;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run synth/ingest/train/render/report from one config");
  add_config(pipeline_cmd);
  add_setting(pipeline_cmd, "--out-dir", pipeline.out_dir, "Output directory");
  add_setting(pipeline_cmd, "--min-samples", pipeline.min_samples, "Override [train] min_samples");
  add_setting(pipeline_cmd, "--min-gain", pipeline.min_gain, "Override [train] min_gain");
  add_setting(pipeline_cmd, "--max-depth", pipeline.max_depth, "Override [train] max_depth");

  std::vector<std::string> argv_storage{"delaytree"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "delaytree: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    common.load();
    if (synth_cmd->parsed()) return run_synth(common, synth, log);
    if (ingest_cmd->parsed()) return run_ingest(common, ingest, log);
    if (train_cmd->parsed()) return run_train(common, train, log);
    if (render_cmd->parsed()) return run_render(common, render, out, log);
    if (report_cmd->parsed()) return run_report(common, report, out, log);
    if (pipeline_cmd->parsed()) return run_pipeline(common, pipeline, out, log);
  } catch (const UsageError& e) {
    err << "delaytree: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "delaytree: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const DomainError& e) {
    err << "delaytree: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "delaytree: data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace delaytree
