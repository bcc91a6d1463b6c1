#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "uavroute/types.hpp"

namespace uavroute {

// Planar wind speed [dx dy] in m/s. Spatially uniform over the flight area.
using WindVector = Eigen::Vector2d;

// splitmix64 finalizer; a stateless 64-bit hash used for every derived seed.
std::uint64_t splitmix64(std::uint64_t x);

class DegenerateDirectionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Compass direction the wind blows toward.
enum class WindDirection { North, South, East, West };

WindVector direction_vector(WindDirection dir);
const char* to_string(WindDirection dir);

/// Duty-cycled wind: blows at `speed` for `blow_duration` seconds at the start
/// of every `cycle`, then calms for the rest of it. Each cycle draws one of the
/// four compass directions from `seed`.
struct WindPattern {
  double speed = 2.0;
  double blow_duration = 30.0;
  double cycle = 40.0;
  std::uint64_t seed = 0;

  WindDirection direction_for_cycle(std::int64_t cycle_index) const;
};

/// Piecewise-constant wind read from (time_s, dx, dy) rows. Zero before the
/// first row; each row holds until the next one.
struct WindTrace {
  struct Sample {
    double time_s;
    WindVector wind;
  };
  std::vector<Sample> samples;

  WindVector at_time(double t) const;
};

WindTrace read_wind_trace_csv(std::istream& in);
void write_wind_trace_csv(std::ostream& out, const WindTrace& trace);

using WindModel = std::variant<WindPattern, WindTrace>;

WindVector wind_at(const WindPattern& pattern, TimeIndex k, double t_s = kDefaultSamplePeriod);
WindVector wind_at(const WindModel& model, TimeIndex k, double t_s = kDefaultSamplePeriod);

/// Pure headwind at the cap: -d_cap * travel_dir.
WindVector worst_case_wind(double d_cap, const Eigen::Vector2d& travel_dir);
/// Pure tailwind at the cap: +d_cap * travel_dir.
WindVector best_case_wind(double d_cap, const Eigen::Vector2d& travel_dir);

double wind_cap(const WindModel& model);

}  // namespace uavroute
