#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavroute/types.hpp"

namespace uavroute {

class BoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Axial coordinate of a flat-top hexagon.
struct HexCoord {
  int q = 0;
  int r = 0;
  auto operator<=>(const HexCoord&) const = default;
};

std::ostream& operator<<(std::ostream& os, HexCoord h);

// Neighbor order: starting at the direction 30 degrees counter-clockwise of
// east (flat-top hexes have no due-east neighbor) and proceeding
// counter-clockwise in 60 degree steps.
inline constexpr std::array<HexCoord, 6> kHexDirections{
    {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

struct HexNeighbors {
  std::array<HexCoord, 6> items{};
  int count = 0;

  const HexCoord* begin() const { return items.data(); }
  const HexCoord* end() const { return items.data() + count; }
  std::size_t size() const { return static_cast<std::size_t>(count); }
};

/// Hexagon tessellation of a width x height rectangle.
///
/// Hex (0,0) is centered on the rectangle origin. A hex belongs to the grid
/// when its center lies inside the closed rectangle; hexes whose centers fall
/// outside are clipped even if they overlap the rectangle.
///
/// Nodes live at hex centers, obstacles are whole hexes. The grid is immutable
/// once a scenario is built and may be shared read-only between agents.
class HexGrid {
 public:
  HexGrid(double width_m, double height_m, double side_m = 1.0);

  double width() const { return width_m_; }
  double height() const { return height_m_; }
  double side() const { return side_m_; }
  double hop_length() const;

  bool contains(HexCoord h) const;
  bool contains(const Position2D& p) const;

  Position2D center_position(HexCoord h) const;
  HexNeighbors neighbors(HexCoord h) const;

  /// Hex whose region contains `p`. Points on a shared edge or vertex go to
  /// the lexicographically smallest (q, r). Points in the clipped margin of
  /// the rectangle map to the nearest in-grid center.
  HexCoord containing_hex(const Position2D& p) const;

  // Dense indexing over in-grid hexes, column-major in offset layout.
  std::size_t index_capacity() const { return static_cast<std::size_t>(cols_ * stride_); }
  std::size_t index(HexCoord h) const;
  std::vector<HexCoord> all_hexes() const;
  std::size_t hex_count() const { return hex_count_; }

  // Obstacles (L_o).
  void add_obstacle(HexCoord h);
  bool is_obstacle(HexCoord h) const;
  const std::vector<HexCoord>& obstacles() const { return obstacle_list_; }

  // Nodes (l_v) and depots (V_0).
  void add_node(NodeId id, HexCoord h);
  void assign_depot(UavId uav, NodeId node);
  const std::map<NodeId, HexCoord>& nodes() const { return nodes_; }
  const std::map<UavId, NodeId>& depots() const { return depots_; }
  HexCoord node_hex(NodeId id) const;
  Position2D node_position(NodeId id) const { return center_position(node_hex(id)); }
  std::optional<NodeId> node_at(HexCoord h) const;

  /// Throws std::logic_error when a scenario-level invariant is broken.
  void validate() const;

 private:
  int rows_in_column(int q) const;

  double width_m_;
  double height_m_;
  double side_m_;
  int cols_ = 0;
  int stride_ = 0;
  std::size_t hex_count_ = 0;

  std::vector<char> obstacle_mask_;
  std::vector<HexCoord> obstacle_list_;
  std::map<NodeId, HexCoord> nodes_;
  std::map<HexCoord, NodeId> hex_to_node_;
  std::map<UavId, NodeId> depots_;
};

}  // namespace uavroute
