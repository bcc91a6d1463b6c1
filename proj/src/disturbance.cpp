#include "uavroute/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace uavroute {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

Eigen::Vector2d unit_or_throw(const Eigen::Vector2d& dir) {
  const double n = dir.norm();
  if (!(n > 1e-12)) throw DegenerateDirectionError("travel direction has zero length");
  return dir / n;
}

}  // namespace

WindVector direction_vector(WindDirection dir) {
  switch (dir) {
    case WindDirection::North: return {0.0, 1.0};
    case WindDirection::South: return {0.0, -1.0};
    case WindDirection::East: return {1.0, 0.0};
    case WindDirection::West: return {-1.0, 0.0};
  }
  return WindVector::Zero();
}

const char* to_string(WindDirection dir) {
  switch (dir) {
    case WindDirection::North: return "N";
    case WindDirection::South: return "S";
    case WindDirection::East: return "E";
    case WindDirection::West: return "W";
  }
  return "?";
}

WindDirection WindPattern::direction_for_cycle(std::int64_t cycle_index) const {
  const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(cycle_index)));
  return static_cast<WindDirection>(h >> 62);
}

WindVector wind_at(const WindPattern& pattern, TimeIndex k, double t_s) {
  if (k < 0) k = 0;
  // Integer step arithmetic keeps the duty cycle exact.
  const auto cycle_steps = static_cast<TimeIndex>(std::llround(pattern.cycle / t_s));
  const auto blow_steps = static_cast<TimeIndex>(std::llround(pattern.blow_duration / t_s));
  if (cycle_steps <= 0 || pattern.speed == 0.0) return WindVector::Zero();
  const TimeIndex cycle = k / cycle_steps;
  const TimeIndex phase = k % cycle_steps;
  if (phase >= blow_steps) return WindVector::Zero();
  return pattern.speed * direction_vector(pattern.direction_for_cycle(cycle));
}

WindVector WindTrace::at_time(double t) const {
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double time, const Sample& s) { return time < s.time_s; });
  if (it == samples.begin()) return WindVector::Zero();
  return std::prev(it)->wind;
}

WindTrace read_wind_trace_csv(std::istream& in) {
  WindTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0.0, dx = 0.0, dy = 0.0;
    if (!(row >> t >> dx >> dy)) {
      if (trace.samples.empty()) continue;  // header
      throw std::runtime_error("malformed wind trace row: " + line);
    }
    if (!trace.samples.empty() && t < trace.samples.back().time_s) {
      throw std::runtime_error("wind trace times must be non-decreasing");
    }
    trace.samples.push_back({t, {dx, dy}});
  }
  return trace;
}

void write_wind_trace_csv(std::ostream& out, const WindTrace& trace) {
  out << "time_s,dx,dy\n";
  for (const auto& s : trace.samples) out << s.time_s << ',' << s.wind.x() << ',' << s.wind.y() << '\n';
}

WindVector wind_at(const WindModel& model, TimeIndex k, double t_s) {
  return std::visit(
      [&](const auto& m) -> WindVector {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WindPattern>) {
          return wind_at(m, k, t_s);
        } else {
          return m.at_time(static_cast<double>(k) * t_s);
        }
      },
      model);
}

WindVector worst_case_wind(double d_cap, const Eigen::Vector2d& travel_dir) {
  return -d_cap * unit_or_throw(travel_dir);
}

WindVector best_case_wind(double d_cap, const Eigen::Vector2d& travel_dir) {
  return d_cap * unit_or_throw(travel_dir);
}

double wind_cap(const WindModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WindPattern>) {
          return m.speed;
        } else {
          double cap = 0.0;
          for (const auto& s : m.samples) cap = std::max(cap, s.wind.norm());
          return cap;
        }
      },
      model);
}

}  // namespace uavroute
