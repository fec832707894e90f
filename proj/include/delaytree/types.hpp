#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace delaytree {

// Niagara frontier crossings: Peace Bridge, Rainbow Bridge, Lewiston-Queenston.
enum class Bridge { PB, RB, LQ };
enum class Direction { to_us, to_can };
enum class Vehicle { passenger, commercial };
enum class WeatherCondition { Snow, Rain, Clear };

inline constexpr std::array kAllBridges{Bridge::PB, Bridge::RB, Bridge::LQ};
inline constexpr std::array kAllDirections{Direction::to_us, Direction::to_can};
inline constexpr std::array kAllVehicles{Vehicle::passenger, Vehicle::commercial};

std::string_view to_string(Bridge b);
std::string_view to_string(Direction d);
std::string_view to_string(Vehicle v);
std::string_view to_string(WeatherCondition c);

// Case-insensitive.
std::optional<Bridge> parse_bridge(std::string_view text);
std::optional<Direction> parse_direction(std::string_view text);
std::optional<Vehicle> parse_vehicle(std::string_view text);
std::optional<WeatherCondition> parse_condition(std::string_view text);

// Bridges open to a vehicle type, in pattern order. Commercial trucks are not
// permitted on the Rainbow Bridge.
std::span<const Bridge> bridges_for(Vehicle v);
bool carries(Bridge b, Vehicle v);

// One (vehicle, direction) traffic stream; each gets its own pattern dataset
// and tree.
struct Stream {
  Vehicle vehicle = Vehicle::passenger;
  Direction direction = Direction::to_us;

  friend auto operator<=>(const Stream&, const Stream&) = default;
};

inline constexpr std::array kAllStreams{
    Stream{Vehicle::passenger, Direction::to_us}, Stream{Vehicle::passenger, Direction::to_can},
    Stream{Vehicle::commercial, Direction::to_us}, Stream{Vehicle::commercial, Direction::to_can}};

// e.g. "passenger_to_us"
std::string stream_name(Stream s);

}  // namespace delaytree
