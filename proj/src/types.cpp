#include "delaytree/types.hpp"

#include <algorithm>

#include "delaytree/text.hpp"

namespace delaytree {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view text, const std::array<Enum, N>& values) {
  for (Enum v : values) {
    if (iequals(text, to_string(v))) return v;
  }
  return std::nullopt;
}

constexpr std::array kPassengerBridges{Bridge::PB, Bridge::RB, Bridge::LQ};
constexpr std::array kCommercialBridges{Bridge::PB, Bridge::LQ};

}  // namespace

std::string_view to_string(Bridge b) {
  switch (b) {
    case Bridge::PB: return "PB";
    case Bridge::RB: return "RB";
    case Bridge::LQ: return "LQ";
  }
  return "?";
}

std::string_view to_string(Direction d) { return d == Direction::to_us ? "to_us" : "to_can"; }

std::string_view to_string(Vehicle v) { return v == Vehicle::passenger ? "passenger" : "commercial"; }

std::string_view to_string(WeatherCondition c) {
  switch (c) {
    case WeatherCondition::Snow: return "Snow";
    case WeatherCondition::Rain: return "Rain";
    case WeatherCondition::Clear: return "Clear";
  }
  return "?";
}

std::optional<Bridge> parse_bridge(std::string_view text) { return parse_enum(text, kAllBridges); }
std::optional<Direction> parse_direction(std::string_view text) { return parse_enum(text, kAllDirections); }
std::optional<Vehicle> parse_vehicle(std::string_view text) { return parse_enum(text, kAllVehicles); }

std::optional<WeatherCondition> parse_condition(std::string_view text) {
  return parse_enum(text, std::array{WeatherCondition::Snow, WeatherCondition::Rain, WeatherCondition::Clear});
}

std::span<const Bridge> bridges_for(Vehicle v) {
  if (v == Vehicle::passenger) return kPassengerBridges;
  return kCommercialBridges;
}

bool carries(Bridge b, Vehicle v) {
  auto bridges = bridges_for(v);
  return std::find(bridges.begin(), bridges.end(), b) != bridges.end();
}

std::string stream_name(Stream s) {
  return std::string(to_string(s.vehicle)) + "_" + std::string(to_string(s.direction));
}

}  // namespace delaytree
