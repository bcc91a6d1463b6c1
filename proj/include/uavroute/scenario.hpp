#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavroute/disturbance.hpp"
#include "uavroute/hexgrid.hpp"

namespace uavroute {

class CapacityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ScenarioFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A flight area with nodes, depots, obstacles, and a wind model. Serialized
/// as JSON with a "format" tag:
///
///   { "format": "uavroute-scenario/1", "name": "...",
///     "area": {"width": 52, "height": 30, "side": 1},
///     "obstacles": [[q, r], ...],
///     "nodes": [{"id": 1, "q": 3, "r": -1}, ...],
///     "uavs": [{"id": 1, "depot": 31}, ...],
///     "wind": {"type": "pattern", "speed": 2, "blow": 30, "cycle": 40, "seed": 7}
///          | {"type": "trace", "samples": [[t, dx, dy], ...]} }
struct Scenario {
  struct Node {
    NodeId id;
    HexCoord hex;
  };
  struct Uav {
    UavId id;
    NodeId depot;
  };

  std::string name = "scenario";
  double width_m = 52.0;
  double height_m = 30.0;
  double side_m = 1.0;
  std::vector<HexCoord> obstacles;
  std::vector<Node> nodes;  // depots included
  std::vector<Uav> uavs;
  WindModel wind = WindPattern{};

  /// Builds the grid; throws on any invalid placement.
  HexGrid build_grid() const;
};

Scenario read_scenario_json(std::istream& in);
void write_scenario_json(std::ostream& out, const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);

struct GeneratorConfig {
  double width_m = 52.0;
  double height_m = 30.0;
  double side_m = 1.0;
  int n_nodes = 30;
  int n_uavs = 4;
  double wind_speed = 2.0;
  double obstacle_fraction = 0.0;
};

/// Nodes, depots, and obstacles on distinct hexes drawn uniformly at random.
/// Node ids are 1..n_nodes, depot ids follow, UAV ids are 1..n_uavs.
/// Deterministic for a given seed on every platform.
Scenario generate_scenario(const GeneratorConfig& cfg, std::uint64_t seed);

}  // namespace uavroute
