#include "uavroute/astar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

namespace uavroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Hermite {
  Eigen::Vector2d p0, v0, p1, v1;
  double duration;

  void eval(double tau, Eigen::Vector2d& pos, Eigen::Vector2d& vel) const {
    const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau, t5 = t4 * tau;
    const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h10 = tau - 6 * t3 + 8 * t4 - 3 * t5;
    const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
    const double d00 = -30 * t2 + 60 * t3 - 30 * t4;
    const double d10 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
    const double d11 = -12 * t2 + 28 * t3 - 15 * t4;
    pos = h00 * p0 + h10 * duration * v0 + h01 * p1 + h11 * duration * v1;
    vel = d00 * (p0 - p1) / duration + d10 * v0 + d11 * v1;
  }
};

}  // namespace

std::optional<HexRoute> search_hex_route(const HexGrid& grid, HexCoord start, HexCoord goal,
                                         const WindVector& d_now, const CraftParams& params,
                                         SearchTrace* trace) {
  if (!grid.contains(start)) throw BoundsError("start hex outside grid");
  if (!grid.contains(goal)) throw BoundsError("goal hex outside grid");
  if (grid.is_obstacle(start)) throw InvalidStartError("start hex is an obstacle");
  if (grid.is_obstacle(goal)) return std::nullopt;

  // All hops have the same length, so the edge weight depends only on direction.
  std::array<EnergyJ, 6> hop_energy;
  std::array<double, 6> hop_seconds;
  {
    const Position2D origin = Position2D::Zero();
    const double side = grid.side();
    const double v_r = max_relative_speed(params);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto d = kHexDirections[i];
      const Position2D step{1.5 * side * d.q, 1.7320508075688772 * side * (d.r + 0.5 * d.q)};
      hop_energy[i] = travel_energy<double>(origin, step, d_now, params);
      const auto v_a = ground_speed<double>(v_r, d_now, step);
      hop_seconds[i] = v_a ? step.norm() / *v_a : kInf;
    }
  }

  const std::size_t cap = grid.index_capacity();
  std::vector<double> g(cap, kInf), f(cap, kInf), h(cap, -1.0), t_reach(cap, kInf);
  std::vector<HexCoord> parent(cap);
  std::vector<char> has_parent(cap, 0), in_open(cap, 0), closed(cap, 0);
  std::set<std::tuple<double, HexCoord>> open;

  const Position2D goal_center = grid.center_position(goal);
  auto heuristic = [&](HexCoord l, std::size_t i) {
    if (h[i] < 0.0) h[i] = travel_energy<double>(grid.center_position(l), goal_center, d_now, params).joules();
    return h[i];
  };

  const std::size_t si = grid.index(start);
  g[si] = 0.0;
  f[si] = heuristic(start, si);
  t_reach[si] = 0.0;
  open.emplace(f[si], start);
  in_open[si] = 1;

  bool reached = false;
  while (!open.empty()) {
    const auto [fc, lc] = *open.begin();
    if (fc == kInf) break;  // only unreachable entries left
    if (lc == goal) {
      reached = true;
      break;
    }
    const std::size_t ci = grid.index(lc);
    open.erase(open.begin());
    in_open[ci] = 0;
    closed[ci] = 1;
    if (trace) trace->expansion_order.push_back(lc);

    for (std::size_t dir = 0; dir < 6; ++dir) {
      const HexCoord ln{lc.q + kHexDirections[dir].q, lc.r + kHexDirections[dir].r};
      if (!grid.contains(ln)) continue;
      const std::size_t ni = grid.index(ln);
      if (grid.is_obstacle(ln) || closed[ni]) continue;
      // The listing adds l_n to the open set before the cost test.
      if (!in_open[ni]) {
        open.emplace(f[ni], ln);
        in_open[ni] = 1;
      }
      if (!hop_energy[dir].feasible()) continue;
      const double new_g = g[ci] + hop_energy[dir].joules();
      if (new_g >= g[ni]) continue;
      open.erase({f[ni], ln});
      parent[ni] = lc;
      has_parent[ni] = 1;
      g[ni] = new_g;
      f[ni] = new_g + heuristic(ln, ni);
      t_reach[ni] = t_reach[ci] + hop_seconds[dir];
      open.emplace(f[ni], ln);
    }
  }
  if (!reached) return std::nullopt;

  HexRoute route;
  route.cost = EnergyJ(g[grid.index(goal)]);
  route.travel_seconds = t_reach[grid.index(goal)];
  for (HexCoord cur = goal;;) {
    route.hexes.push_back(cur);
    const std::size_t i = grid.index(cur);
    if (!has_parent[i]) break;
    cur = parent[i];
  }
  std::reverse(route.hexes.begin(), route.hexes.end());
  return route;
}

double segment_ground_speed(const Eigen::Vector2d& dir, const WindVector& d, const TrajectoryLimits& limits,
                            const CraftParams& params) {
  const double v_r = max_relative_speed(params);
  auto gs = ground_speed<double>(std::min(limits.cruise_airspeed, v_r), d, dir);
  if (!gs) gs = ground_speed<double>(v_r, d, dir);
  const double v = gs ? *gs : limits.min_ground_speed;
  return std::clamp(v, limits.min_ground_speed, limits.max_ground_speed);
}

std::optional<DesirablePath> plan_path(const HexGrid& grid, const Position2D& start, NodeId goal,
                                       const WindVector& d_now, const CraftParams& params,
                                       const TrajectoryLimits& limits, double t_s,
                                       const Eigen::Vector2d& start_velocity, double altitude) {
  const HexCoord goal_hex = grid.node_hex(goal);
  // A craft overshooting a boundary hex can sit just outside the area.
  const Position2D inside = start.cwiseMax(Position2D::Zero()).cwiseMin(Position2D(grid.width(), grid.height()));
  const HexCoord start_hex = grid.containing_hex(inside);
  if (grid.is_obstacle(start_hex)) throw InvalidStartError("start position lies in an obstacle hex");
  auto route = search_hex_route(grid, start_hex, goal_hex, d_now, params);
  if (!route) return std::nullopt;

  DesirablePath path;
  path.hexes = std::move(route->hexes);
  path.search_cost = route->cost;
  path.waypoints.push_back(start);
  for (std::size_t i = 1; i < path.hexes.size(); ++i) path.waypoints.push_back(grid.center_position(path.hexes[i]));
  if (path.hexes.size() == 1) {
    const Position2D c = grid.center_position(goal_hex);
    if ((c - start).norm() > 1e-9) path.waypoints.push_back(c);
  }

  std::vector<double> speeds;
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    speeds.push_back(segment_ground_speed(path.waypoints[i + 1] - path.waypoints[i], d_now, limits, params));
  }
  path.states = desirable_states(path.waypoints, speeds, t_s, start_velocity, altitude);
  return path;
}

std::vector<UavState> desirable_states(const std::vector<Position2D>& waypoints_in,
                                       const std::vector<double>& segment_speeds, double t_s,
                                       const Eigen::Vector2d& start_velocity, double altitude) {
  if (waypoints_in.empty()) throw std::invalid_argument("desirable_states needs at least one waypoint");
  if (!(t_s > 0.0)) throw std::invalid_argument("sampling period must be positive");

  // Drop repeated waypoints; they carry no segment.
  std::vector<Position2D> wp{waypoints_in.front()};
  std::vector<double> speed;
  for (std::size_t i = 1; i < waypoints_in.size(); ++i) {
    if ((waypoints_in[i] - wp.back()).norm() <= 1e-12) continue;
    wp.push_back(waypoints_in[i]);
    speed.push_back(i - 1 < segment_speeds.size() ? segment_speeds[i - 1] : segment_speeds.back());
  }
  if (wp.size() == 1) return {UavState::at_rest(wp.front(), altitude)};

  const std::size_t segs = wp.size() - 1;
  std::vector<double> duration(segs);
  for (std::size_t i = 0; i < segs; ++i) {
    if (!(speed[i] > 0.0)) throw std::invalid_argument("segment speed must be positive");
    duration[i] = (wp[i + 1] - wp[i]).norm() / speed[i];
  }
  if (segs == 1) {
    // Rest-to-rest minimum-jerk profile peaks at 1.875x its mean speed.
    duration[0] *= 1.875;
  } else {
    const Eigen::Vector2d dir0 = (wp[1] - wp[0]).normalized();
    const double carried = std::clamp(start_velocity.dot(dir0) / speed[0], 0.0, 1.0);
    duration.front() *= 2.0 - carried;
    duration.back() *= 2.0;
  }

  // Stretch so the trajectory ends exactly on a sample.
  const double total = std::accumulate(duration.begin(), duration.end(), 0.0);
  const auto steps = static_cast<TimeIndex>(std::max(1.0, std::ceil(total / t_s - 1e-9)));
  const double scale = static_cast<double>(steps) * t_s / total;
  for (auto& d : duration) d *= scale;

  std::vector<Eigen::Vector2d> knot_v(wp.size(), Eigen::Vector2d::Zero());
  knot_v.front() = start_velocity;
  for (std::size_t i = 1; i + 1 < wp.size(); ++i) {
    knot_v[i] = (wp[i + 1] - wp[i - 1]) / (duration[i - 1] + duration[i]);
  }

  std::vector<Hermite> pieces;
  pieces.reserve(segs);
  for (std::size_t i = 0; i < segs; ++i) pieces.push_back({wp[i], knot_v[i], wp[i + 1], knot_v[i + 1], duration[i]});

  std::vector<UavState> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  std::size_t seg = 0;
  double seg_start = 0.0;
  Eigen::Vector2d pos, vel;
  for (TimeIndex j = 0; j <= steps; ++j) {
    const double t = static_cast<double>(j) * t_s;
    while (seg + 1 < segs && t >= seg_start + pieces[seg].duration) {
      seg_start += pieces[seg].duration;
      ++seg;
    }
    const double tau = std::clamp((t - seg_start) / pieces[seg].duration, 0.0, 1.0);
    pieces[seg].eval(j == steps ? 1.0 : tau, pos, vel);
    UavState s;
    s.p << pos.x(), pos.y(), altitude;
    s.v << vel.x(), vel.y(), 0.0;
    states.push_back(s);
  }
  states.back().p.head<2>() = wp.back();
  states.back().v.setZero();
  return states;
}

std::vector<UavState> desirable_states(const std::vector<Position2D>& waypoints, double v_cruise, double t_s) {
  const std::size_t segs = waypoints.empty() ? 0 : waypoints.size() - 1;
  return desirable_states(waypoints, std::vector<double>(std::max<std::size_t>(segs, 1), v_cruise), t_s);
}

void write_expansion_dump(std::ostream& out, const SearchTrace& trace) {
  for (std::size_t i = 0; i < trace.expansion_order.size(); ++i) {
    out << i << ' ' << trace.expansion_order[i].q << ' ' << trace.expansion_order[i].r << '\n';
  }
}

}  // namespace uavroute
