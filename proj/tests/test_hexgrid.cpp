#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "uavroute/hexgrid.hpp"

using namespace uavroute;

TEST_CASE("center_position anchors hex (0,0) at the origin") {
  const HexGrid g(52.0, 30.0);
  CHECK(g.center_position({0, 0}).isZero(0.0));
}

TEST_CASE("adjacent centers are side * sqrt(3) apart in every direction") {
  for (double side : {1.0, 2.5}) {
    const HexGrid g(40.0, 40.0, side);
    const HexCoord h{6, 4};
    REQUIRE(g.neighbors(h).size() == 6);
    double lo = 1e300, hi = 0.0;
    for (HexCoord n : g.neighbors(h)) {
      const double d = (g.center_position(n) - g.center_position(h)).norm();
      lo = std::min(lo, d);
      hi = std::max(hi, d);
      CHECK(d == doctest::Approx(side * std::sqrt(3.0)).epsilon(1e-12));
    }
    CHECK(hi - lo <= 1e-12 * side);
  }
}

TEST_CASE("neighbors: interior has six, corners have at most three") {
  const HexGrid g(52.0, 30.0);
  CHECK(g.neighbors({10, 3}).size() == 6);
  const double w = g.width(), h = g.height();
  for (const Position2D corner : {Position2D(0, 0), Position2D(w, 0), Position2D(0, h), Position2D(w, h)}) {
    CHECK(g.neighbors(g.containing_hex(corner)).size() <= 3);
  }
}

TEST_CASE("neighbors come in the documented order") {
  const HexGrid g(52.0, 30.0);
  const HexCoord h{4, 2};
  const auto n = g.neighbors(h);
  REQUIRE(n.size() == 6);
  for (int i = 0; i < 6; ++i) {
    const Position2D d = g.center_position(n.items[i]) - g.center_position(h);
    // 30 degrees, then counter-clockwise in 60 degree steps.
    const double expected = oracle::kPi / 6.0 + i * oracle::kPi / 3.0;
    CHECK(std::remainder(std::atan2(d.y(), d.x()) - expected, 2 * oracle::kPi) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("neighbor relation is symmetric on a 10x10 grid") {
  const HexGrid g = oracle::grid_with(10, 10);
  REQUIRE(g.hex_count() >= 95);
  for (HexCoord a : g.all_hexes()) {
    for (HexCoord b : g.neighbors(a)) {
      const auto back = g.neighbors(b);
      CHECK(std::find(back.begin(), back.end(), a) != back.end());
    }
  }
}

TEST_CASE("out-of-bounds coordinates raise bounds errors") {
  const HexGrid g(10.0, 10.0);
  CHECK_THROWS_AS(g.center_position({-1, 0}), BoundsError);
  CHECK_THROWS_AS(g.neighbors({100, 0}), BoundsError);
  CHECK_THROWS_AS(g.containing_hex(Position2D(-0.5, 1.0)), BoundsError);
  CHECK_THROWS_AS(g.containing_hex(Position2D(1.0, 10.5)), BoundsError);
}

TEST_CASE("containing_hex inverts center_position") {
  for (double side : {1.0, 0.7}) {
    const HexGrid g(30.0, 20.0, side);
    for (HexCoord h : g.all_hexes()) CHECK(g.containing_hex(g.center_position(h)) == h);
  }
}

TEST_CASE("containing_hex agrees with a point-in-polygon oracle") {
  const HexGrid g = oracle::grid_with(10, 10);
  std::mt19937_64 rng(11);

  SUBCASE("random interior points") {
    std::uniform_real_distribution<double> ux(1.0, g.width() - 1.0), uy(1.0, g.height() - 1.0);
    for (int i = 0; i < 2000; ++i) {
      const Position2D p(ux(rng), uy(rng));
      const auto holders = oracle::hexes_holding(g, p);
      REQUIRE(!holders.empty());
      CHECK(g.containing_hex(p) == holders.front());
    }
  }

  SUBCASE("points just inside a shared edge") {
    int checked = 0;
    for (HexCoord a : g.all_hexes()) {
      for (HexCoord b : g.neighbors(a)) {
        const Position2D ca = g.center_position(a), cb = g.center_position(b);
        const Position2D mid = (ca + cb) / 2.0;
        const Position2D edge = Eigen::Rotation2Dd(oracle::kPi / 2) * (cb - ca).normalized();
        for (double along : {-0.4, 0.0, 0.3}) {
          const Position2D p = mid + along * edge + 1e-6 * (ca - cb).normalized();
          if (!g.contains(p)) continue;
          const auto holders = oracle::hexes_holding(g, p, 0.0);
          REQUIRE(holders.size() == 1);
          CHECK(holders.front() == a);
          CHECK(g.containing_hex(p) == a);
          ++checked;
        }
      }
    }
    CHECK(checked > 1000);
  }

  SUBCASE("edge midpoints go to the lexicographically smaller hex") {
    for (HexCoord a : g.all_hexes()) {
      for (HexCoord b : g.neighbors(a)) {
        const Position2D mid = (g.center_position(a) + g.center_position(b)) / 2.0;
        const auto holders = oracle::hexes_holding(g, mid);
        REQUIRE(holders.size() == 2);
        CHECK(g.containing_hex(mid) == std::min(a, b));
        CHECK(holders.front() == std::min(a, b));
      }
    }
  }
}

TEST_CASE("scenario placement invariants are enforced") {
  HexGrid g(10.0, 10.0);
  g.add_obstacle({2, 1});
  CHECK_THROWS(g.add_node(NodeId{1}, {2, 1}));
  g.add_node(NodeId{1}, {1, 1});
  CHECK_THROWS(g.add_node(NodeId{2}, {1, 1}));
  CHECK_THROWS(g.add_obstacle({1, 1}));
  g.add_node(NodeId{2}, {3, 0});
  g.assign_depot(UavId{1}, NodeId{1});
  CHECK_THROWS(g.assign_depot(UavId{2}, NodeId{1}));
  CHECK_THROWS(g.assign_depot(UavId{3}, NodeId{99}));
  CHECK_NOTHROW(g.validate());
  CHECK(g.node_at({3, 0}) == NodeId{2});
  CHECK_FALSE(g.node_at({0, 0}).has_value());
}

TEST_CASE("every hex center lies inside the rectangle") {
  const HexGrid g(52.0, 30.0);
  for (HexCoord h : g.all_hexes()) CHECK(g.contains(g.center_position(h)));
  // 35 columns; odd columns are shifted half a row.
  CHECK(g.hex_count() == 18 * 18 + 17 * 17);
}
