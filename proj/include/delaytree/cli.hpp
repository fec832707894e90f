#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "delaytree/cart.hpp"
#include "delaytree/config.hpp"
#include "delaytree/synth.hpp"
#include "delaytree/types.hpp"

namespace delaytree {

// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `delaytree` tool. `args` excludes the program name.
// Subcommands: synth, ingest, train, render, report, pipeline.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// "passenger.to_us" (also accepts '_' or '/' as separator).
Stream parse_stream(std::string_view text);

// Reads the [synth] section: start, end, seed, flip_probability, jitter,
// streams, base.<vehicle>.<direction>, rule, holidays.
SynthConfig synth_config_from(const ConfigFile& config);

// [train] defaults, then [train.<vehicle>.<direction>] overrides.
TrainConfig train_config_from(const ConfigFile& config, Stream stream);

}  // namespace delaytree
