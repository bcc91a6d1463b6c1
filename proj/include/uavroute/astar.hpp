#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "uavroute/disturbance.hpp"
#include "uavroute/hexgrid.hpp"
#include "uavroute/quadrotor.hpp"

namespace uavroute {

class InvalidStartError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// How the desirable trajectory paces itself along the waypoints.
struct TrajectoryLimits {
  // Airspeed used with the wind-triangle relation to get per-segment ground
  // speed. The default craft can hold about 17 m/s at its tilt limit.
  double cruise_airspeed = 12.0;
  // Ground speed ceiling; hex-center zigzags are not trackable much faster.
  double max_ground_speed = 2.0;
  // Floor used when the wind leaves almost no forward progress.
  double min_ground_speed = 0.2;
};

/// Reference trajectory to one goal: hex-center waypoints and the sampled
/// desirable state at every time index.
struct DesirablePath {
  std::vector<HexCoord> hexes;
  std::vector<Position2D> waypoints;
  std::vector<UavState> states;
  EnergyJ search_cost;  // g(goal) from the hex search

  TimeIndex predicted_travel_time() const {
    return states.empty() ? 0 : static_cast<TimeIndex>(states.size()) - 1;
  }
};

/// Raw search result: hex sequence start..goal and its accumulated cost.
struct HexRoute {
  std::vector<HexCoord> hexes;
  EnergyJ cost;
  double travel_seconds = 0.0;  // steady-flight time along the route
};

struct SearchTrace {
  std::vector<HexCoord> expansion_order;
};

/// Energy-aware A* over the hex grid under frozen wind `d_now`. Edge weight is
/// the steady-flight travel energy between adjacent centers; the heuristic is
/// the straight-line travel energy to the goal. Equal F values are broken by
/// smallest (q, r). Returns nullopt when the goal cannot be reached.
std::optional<HexRoute> search_hex_route(const HexGrid& grid, HexCoord start, HexCoord goal,
                                         const WindVector& d_now, const CraftParams& params,
                                         SearchTrace* trace = nullptr);

std::optional<DesirablePath> plan_path(const HexGrid& grid, const Position2D& start, NodeId goal,
                                       const WindVector& d_now, const CraftParams& params,
                                       const TrajectoryLimits& limits = {}, double t_s = kDefaultSamplePeriod,
                                       const Eigen::Vector2d& start_velocity = Eigen::Vector2d::Zero(),
                                       double altitude = 0.0);

/// Quintic position segments through the waypoints, sampled every t_s.
///
/// Segment durations follow segment length over `segment_speeds[i]`; the
/// first and last segments get extra time to ramp from/to rest. Interior
/// knot velocities are Catmull-Rom tangents, knot accelerations are zero,
/// and the last knot is at rest. Attitude and body rates are zero throughout.
std::vector<UavState> desirable_states(const std::vector<Position2D>& waypoints,
                                       const std::vector<double>& segment_speeds, double t_s,
                                       const Eigen::Vector2d& start_velocity = Eigen::Vector2d::Zero(),
                                       double altitude = 0.0);

/// Convenience overload with one cruise speed for every segment.
std::vector<UavState> desirable_states(const std::vector<Position2D>& waypoints, double v_cruise, double t_s);

/// Planned ground speed for one segment in frozen wind.
double segment_ground_speed(const Eigen::Vector2d& dir, const WindVector& d, const TrajectoryLimits& limits,
                            const CraftParams& params);

/// One line per expanded hex: "<order> <q> <r>".
void write_expansion_dump(std::ostream& out, const SearchTrace& trace);

}  // namespace uavroute
