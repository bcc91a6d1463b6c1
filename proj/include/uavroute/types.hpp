#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

#include <Eigen/Core>

namespace uavroute {

using Position2D = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;

// Opaque ordered identifiers. Ordering is used for every tie-break.
struct NodeId {
  std::int32_t value = -1;
  auto operator<=>(const NodeId&) const = default;
};

struct UavId {
  std::int32_t value = -1;
  auto operator<=>(const UavId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, NodeId id) { return os << 'v' << id.value; }
inline std::ostream& operator<<(std::ostream& os, UavId id) { return os << 'a' << id.value; }

// Discrete time index; t_k = k * t_s.
using TimeIndex = std::int64_t;

inline constexpr double kDefaultSamplePeriod = 0.005;

}  // namespace uavroute
