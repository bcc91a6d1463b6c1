#include "uavroute/hexgrid.hpp"

#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace uavroute {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kEdgeTol = 1e-9;

int floor_div2(int q) { return q >= 0 ? q / 2 : -((-q + 1) / 2); }

int offset_row(HexCoord h) { return h.r + floor_div2(h.q); }

HexCoord cube_round(double fq, double fr) {
  const double fs = -fq - fr;
  double rq = std::round(fq);
  double rr = std::round(fr);
  const double rs = std::round(fs);
  const double dq = std::abs(rq - fq);
  const double dr = std::abs(rr - fr);
  const double ds = std::abs(rs - fs);
  if (dq > dr && dq > ds) {
    rq = -rr - rs;
  } else if (dr > ds) {
    rr = -rq - rs;
  }
  return {static_cast<int>(rq), static_cast<int>(rr)};
}

std::string describe(HexCoord h) {
  std::ostringstream os;
  os << h;
  return os.str();
}

}  // namespace

std::ostream& operator<<(std::ostream& os, HexCoord h) {
  return os << '(' << h.q << ',' << h.r << ')';
}

HexGrid::HexGrid(double width_m, double height_m, double side_m)
    : width_m_(width_m), height_m_(height_m), side_m_(side_m) {
  if (!(width_m > 0.0) || !(height_m > 0.0) || !(side_m > 0.0)) {
    throw std::invalid_argument("hex grid dimensions must be positive");
  }
  cols_ = static_cast<int>(std::floor(width_m / (1.5 * side_m) + kEdgeTol)) + 1;
  stride_ = static_cast<int>(std::floor(height_m / (kSqrt3 * side_m) + kEdgeTol)) + 1;
  for (int q = 0; q < cols_; ++q) hex_count_ += static_cast<std::size_t>(rows_in_column(q));
  obstacle_mask_.assign(index_capacity(), 0);
}

double HexGrid::hop_length() const { return kSqrt3 * side_m_; }

int HexGrid::rows_in_column(int q) const {
  const double limit = height_m_ / (kSqrt3 * side_m_) - 0.5 * (q & 1);
  if (limit < -kEdgeTol) return 0;
  return static_cast<int>(std::floor(limit + kEdgeTol)) + 1;
}

bool HexGrid::contains(HexCoord h) const {
  if (h.q < 0 || h.q >= cols_) return false;
  const int row = offset_row(h);
  return row >= 0 && row < rows_in_column(h.q);
}

bool HexGrid::contains(const Position2D& p) const {
  return p.x() >= -kEdgeTol && p.y() >= -kEdgeTol && p.x() <= width_m_ + kEdgeTol &&
         p.y() <= height_m_ + kEdgeTol;
}

Position2D HexGrid::center_position(HexCoord h) const {
  if (!contains(h)) throw BoundsError("hex " + describe(h) + " is outside the grid");
  return {1.5 * side_m_ * h.q, kSqrt3 * side_m_ * (h.r + 0.5 * h.q)};
}

HexNeighbors HexGrid::neighbors(HexCoord h) const {
  if (!contains(h)) throw BoundsError("hex " + describe(h) + " is outside the grid");
  HexNeighbors out;
  for (const auto& d : kHexDirections) {
    const HexCoord n{h.q + d.q, h.r + d.r};
    if (contains(n)) out.items[static_cast<std::size_t>(out.count++)] = n;
  }
  return out;
}

HexCoord HexGrid::containing_hex(const Position2D& p) const {
  if (!contains(p)) throw BoundsError("position outside the flight area");
  const double fq = (2.0 / 3.0) * p.x() / side_m_;
  const double fr = (-1.0 / 3.0 * p.x() + kSqrt3 / 3.0 * p.y()) / side_m_;
  const HexCoord guess = cube_round(fq, fr);

  // Hex regions are the Voronoi cells of the centers, so the containing hex is
  // the nearest center. Scan two rings to cover the clipped margin.
  std::optional<HexCoord> best;
  double best_d2 = 0.0;
  const double tol = kEdgeTol * side_m_ * side_m_;
  for (int dq = -2; dq <= 2; ++dq) {
    for (int dr = -2; dr <= 2; ++dr) {
      if (std::abs(dq + dr) > 2) continue;
      const HexCoord c{guess.q + dq, guess.r + dr};
      if (!contains(c)) continue;
      const double d2 = (center_position(c) - p).squaredNorm();
      if (!best || d2 < best_d2 - tol) {
        best = c;
        best_d2 = d2;
      } else if (d2 <= best_d2 + tol && c < *best) {
        best = c;
        best_d2 = std::min(best_d2, d2);
      }
    }
  }
  if (!best) throw BoundsError("no grid hex near position");
  return *best;
}

std::size_t HexGrid::index(HexCoord h) const {
  if (!contains(h)) throw BoundsError("hex " + describe(h) + " is outside the grid");
  return static_cast<std::size_t>(h.q * stride_ + offset_row(h));
}

std::vector<HexCoord> HexGrid::all_hexes() const {
  std::vector<HexCoord> out;
  out.reserve(hex_count_);
  for (int q = 0; q < cols_; ++q) {
    const int rows = rows_in_column(q);
    for (int row = 0; row < rows; ++row) out.push_back({q, row - floor_div2(q)});
  }
  return out;
}

void HexGrid::add_obstacle(HexCoord h) {
  const std::size_t i = index(h);
  if (hex_to_node_.count(h)) throw std::invalid_argument("obstacle placed on node hex " + describe(h));
  if (!obstacle_mask_[i]) {
    obstacle_mask_[i] = 1;
    obstacle_list_.push_back(h);
  }
}

bool HexGrid::is_obstacle(HexCoord h) const { return contains(h) && obstacle_mask_[index(h)] != 0; }

void HexGrid::add_node(NodeId id, HexCoord h) {
  if (!contains(h)) throw BoundsError("node hex " + describe(h) + " is outside the grid");
  if (is_obstacle(h)) throw std::invalid_argument("node placed on obstacle hex " + describe(h));
  if (nodes_.count(id)) throw std::invalid_argument("duplicate node id");
  if (hex_to_node_.count(h)) throw std::invalid_argument("two nodes share hex " + describe(h));
  nodes_.emplace(id, h);
  hex_to_node_.emplace(h, id);
}

void HexGrid::assign_depot(UavId uav, NodeId node) {
  if (!nodes_.count(node)) throw std::invalid_argument("depot must be an existing node");
  for (const auto& [other, n] : depots_) {
    if (n == node && other != uav) throw std::invalid_argument("depot already hosts a UAV");
  }
  depots_[uav] = node;
}

HexCoord HexGrid::node_hex(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("unknown node id");
  return it->second;
}

std::optional<NodeId> HexGrid::node_at(HexCoord h) const {
  auto it = hex_to_node_.find(h);
  if (it == hex_to_node_.end()) return std::nullopt;
  return it->second;
}

void HexGrid::validate() const {
  std::set<NodeId> depot_nodes;
  for (const auto& [uav, node] : depots_) {
    if (!nodes_.count(node)) throw std::logic_error("depot is not a node");
    if (!depot_nodes.insert(node).second) throw std::logic_error("depot hosts more than one UAV");
  }
  for (const auto& [id, h] : nodes_) {
    if (is_obstacle(h)) throw std::logic_error("node on obstacle hex");
  }
}

}  // namespace uavroute
