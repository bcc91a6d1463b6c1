#pragma once

// Reference implementations the tests compare against. None of these call the
// library routine they check; they share only the value types.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include "uavroute/hexgrid.hpp"
#include "uavroute/quadrotor.hpp"

namespace oracle {

using uavroute::HexCoord;
using uavroute::HexGrid;
using uavroute::Position2D;

inline constexpr double kPi = 3.14159265358979323846;

// Flat-top hexagon corners, counter-clockwise from the east vertex.
inline std::array<Position2D, 6> hex_corners(const Position2D& c, double side) {
  std::array<Position2D, 6> v;
  for (int i = 0; i < 6; ++i) {
    const double a = kPi / 3.0 * i;
    v[i] = c + side * Position2D(std::cos(a), std::sin(a));
  }
  return v;
}

inline double segment_distance(const Position2D& p, const Position2D& a, const Position2D& b) {
  const Position2D ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - p).norm();
}

/// Even-odd ray casting. Points within `edge_tol` of the boundary count as inside.
inline bool point_in_polygon(const Position2D& p, std::span<const Position2D> poly, double edge_tol = 1e-9) {
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) <= edge_tol) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Position2D& a = poly[i];
    const Position2D& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

/// Every in-grid hex whose polygon holds `p`, in (q, r) order.
inline std::vector<HexCoord> hexes_holding(const HexGrid& grid, const Position2D& p, double edge_tol = 1e-9) {
  std::vector<HexCoord> out;
  for (HexCoord h : grid.all_hexes()) {
    const auto corners = hex_corners(grid.center_position(h), grid.side());
    if (point_in_polygon(p, corners, edge_tol)) out.push_back(h);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// v_r = (sqrt(F_max^2 - (m g)^2) / (rho C_d A / 2))^(1/4), written out directly.
inline double max_relative_speed(const uavroute::CraftParams& c) {
  const double fmax = 4.0 * c.kappa_f * c.omega_max * c.omega_max;
  const double fg = c.mass_kg * c.gravity;
  return std::sqrt(std::sqrt(fmax * fmax - fg * fg) / (0.5 * c.drag_coeff * c.air_density * c.ref_area_m2));
}

/// Rotor energy 4 k_m w_max^3 dist / v_a, with theta measured between d and the
/// travel direction.
inline std::optional<double> hop_energy(double dist, double d_norm, double theta, const uavroute::CraftParams& c) {
  if (dist == 0.0) return 0.0;
  const double vr = max_relative_speed(c);
  const double across = d_norm * std::sin(theta);
  const double radicand = vr * vr - across * across;
  if (radicand <= 0.0) return std::nullopt;
  const double va = std::sqrt(radicand) + d_norm * std::cos(theta);
  if (va <= 0.0) return std::nullopt;
  return 4.0 * c.kappa_m * std::pow(c.omega_max, 3) * dist / va;
}

inline std::optional<double> hop_energy(const Position2D& a, const Position2D& b, const Eigen::Vector2d& d,
                                        const uavroute::CraftParams& c) {
  const Eigen::Vector2d delta = b - a;
  const double dn = d.norm();
  const double theta = dn == 0.0 || delta.norm() == 0.0
                           ? 0.0
                           : std::acos(std::clamp(d.dot(delta) / (dn * delta.norm()), -1.0, 1.0));
  return hop_energy(delta.norm(), dn, theta, c);
}

/// Plain Dijkstra over in-grid, non-obstacle hexes using the library's edge
/// weights. Returns nullopt when `goal` is unreachable.
template <typename EdgeWeight>
std::optional<double> dijkstra(const HexGrid& grid, HexCoord start, HexCoord goal, EdgeWeight&& weight) {
  std::map<HexCoord, double> dist;
  using Item = std::pair<double, HexCoord>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[start] = 0.0;
  pq.push({0.0, start});
  while (!pq.empty()) {
    const auto [d, h] = pq.top();
    pq.pop();
    if (d > dist[h]) continue;
    if (h == goal) return d;
    for (HexCoord n : grid.neighbors(h)) {
      if (grid.is_obstacle(n)) continue;
      const double w = weight(h, n);
      if (!std::isfinite(w)) continue;
      const auto it = dist.find(n);
      if (it == dist.end() || d + w < it->second) {
        dist[n] = d + w;
        pq.push({d + w, n});
      }
    }
  }
  return std::nullopt;
}

struct Circle {
  Position2D center;
  double radius;
};

inline std::optional<Circle> circumcircle(const Position2D& a, const Position2D& b, const Position2D& c) {
  const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
  if (std::abs(d) < 1e-12) return std::nullopt;
  const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
  const Position2D center((a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
                          (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d);
  return Circle{center, (center - a).norm()};
}

/// O(n^4) minimum enclosing circle: smallest circle over all pairs and
/// triples that contains every point.
inline Circle brute_force_mec(std::span<const Position2D> pts) {
  if (pts.empty()) return {Position2D::Zero(), 0.0};
  if (pts.size() == 1) return {pts[0], 0.0};
  auto encloses = [&](const Circle& c) {
    for (const auto& p : pts) {
      if ((p - c.center).norm() > c.radius * (1.0 + 1e-12) + 1e-12) return false;
    }
    return true;
  };
  Circle best{Position2D::Zero(), std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Circle c{(pts[i] + pts[j]) / 2.0, (pts[i] - pts[j]).norm() / 2.0};
      if (c.radius < best.radius && encloses(c)) best = c;
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const auto cc = circumcircle(pts[i], pts[j], pts[k]);
        if (cc && cc->radius < best.radius && encloses(*cc)) best = *cc;
      }
    }
  }
  return best;
}

/// Grid with `cols` x `rows` hexes of side 1.
inline HexGrid grid_with(int cols, int rows) {
  return HexGrid(1.5 * (cols - 1) + 0.1, std::sqrt(3.0) * (rows - 1) + 0.1, 1.0);
}

inline Eigen::Vector2d random_in_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double a = 2.0 * kPi * u(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace oracle
