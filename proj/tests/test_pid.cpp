#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "uavroute/pid.hpp"

using namespace uavroute;

namespace {

constexpr double kTs = kDefaultSamplePeriod;

DesirablePath straight_five_hops(HexGrid& g) {
  g.add_node(NodeId{1}, {3, 6});
  auto path = plan_path(g, g.center_position({3, 1}), NodeId{1}, {0.0, 0.0}, CraftParams{});
  REQUIRE(path.has_value());
  return *path;
}

}  // namespace

TEST_CASE("default gains are symmetric positive definite; others are rejected") {
  CHECK_NOTHROW(PidGains{}.validate());
  PidGains bad;
  bad.kp(0, 1) = 1.0;
  CHECK_THROWS(bad.validate());
  PidGains neg;
  neg.kd = -neg.kd;
  CHECK_THROWS(neg.validate());
}

TEST_CASE("a one-state path needs no inputs") {
  DesirablePath p;
  p.states.push_back(UavState::at_rest({1.0, 1.0}));
  const Prediction pr = predict_inputs(p, p.states[0], {0.0, 0.0}, PidGains{}, CraftParams{}, kTs);
  CHECK(pr.inputs.empty());
  CHECK(pr.states.size() == 1);
  const EnergyTriple t = predict_energy_triple(p, p.states[0], {1.0, 0.0}, 8.0, PidGains{}, CraftParams{}, kTs);
  CHECK(t.predicted.joules() == 0.0);
  CHECK(t.max.joules() == 0.0);
  CHECK(t.min.joules() == 0.0);
}

TEST_CASE("tracking a hover reference takes hover thrust and no moments") {
  const CraftParams c;
  DesirablePath p;
  p.states.assign(400, UavState::at_rest({2.0, 3.0}, 10.0));
  const Prediction pr = predict_inputs(p, p.states[0], {0.0, 0.0}, PidGains{}, c, kTs);
  REQUIRE(pr.inputs.size() == 399);
  CHECK_FALSE(pr.saturated);
  for (const auto& u : pr.inputs) {
    CHECK(u[0] == doctest::Approx(c.weight()).epsilon(1e-6));
    CHECK(u.tail<3>().norm() <= 1e-6);
  }
}

TEST_CASE("five straight hops in calm air end within 0.1 m of the goal without saturating") {
  HexGrid g(20.0, 15.0);
  const DesirablePath path = straight_five_hops(g);
  CHECK(path.hexes.size() == 6);
  const Prediction pr = predict_inputs(path, path.states[0], {0.0, 0.0}, PidGains{}, CraftParams{}, kTs);
  CHECK(pr.inputs.size() + 1 == path.states.size());
  CHECK_FALSE(pr.saturated);
  const Eigen::Vector3d goal(g.node_position(NodeId{1}).x(), g.node_position(NodeId{1}).y(), 0.0);
  CHECK((pr.states.back().p - goal).norm() < 0.1);
}

TEST_CASE("position error against a fixed setpoint decays monotonically after 2 s") {
  const CraftParams c;
  std::vector<UavState> ref(static_cast<std::size_t>(8.0 / kTs), UavState::at_rest({0.0, 0.0}, 10.0));
  for (const Eigen::Vector3d offset : {Eigen::Vector3d(1.0, 0.0, 0.0), Eigen::Vector3d(0.6, -0.8, 0.3)}) {
    UavState x0 = ref[0];
    x0.p += offset;
    const Prediction pr = predict_along(ref, x0, [](std::size_t) { return WindVector::Zero(); }, PidGains{}, c, kTs);
    double prev = 1e9;
    for (std::size_t k = static_cast<std::size_t>(2.0 / kTs); k < pr.states.size(); ++k) {
      const double e = (pr.states[k].p - ref[0].p).norm();
      CHECK(e <= prev + 1e-12);
      prev = e;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("energy triple collapses when there is no wind at all") {
  HexGrid g(20.0, 15.0);
  const DesirablePath path = straight_five_hops(g);
  const EnergyTriple t = predict_energy_triple(path, path.states[0], {0.0, 0.0}, 0.0, PidGains{}, CraftParams{}, kTs);
  CHECK(t.predicted.joules() > 0.0);
  CHECK(t.max == t.predicted);
  CHECK(t.min == t.predicted);
}

TEST_CASE("energy triple is ordered min <= predicted <= max on random paths") {
  const CraftParams c;
  std::mt19937_64 rng(12);
  HexGrid g(20.0, 15.0);
  const std::vector<HexCoord> hexes = g.all_hexes();
  std::uniform_int_distribution<std::size_t> pick(0, hexes.size() - 1);
  g.add_node(NodeId{1}, hexes[pick(rng)]);
  for (int i = 0; i < 25; ++i) {
    const double cap = (i % 2) ? 8.0 : 2.0;
    const WindVector d = oracle::random_in_disk(rng, cap);
    const HexCoord from = hexes[pick(rng)];
    const auto path = plan_path(g, g.center_position(from), NodeId{1}, d, c);
    REQUIRE(path.has_value());
    const EnergyTriple t = predict_energy_triple(*path, path->states[0], d, cap, PidGains{}, c, kTs);
    CHECK(t.min.joules() <= t.predicted.joules());
    CHECK(t.predicted.joules() <= t.max.joules());
  }
}

TEST_CASE("extremal wind for a hovering reference") {
  const CraftParams c;
  const WindVector worst = extremal_wind(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), 8.0, c, true);
  const WindVector best = extremal_wind(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), 8.0, c, false);
  CHECK(worst.norm() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(best.norm() == 0.0);
  CHECK(extremal_wind({2.0, 0.0, 0.0}, Eigen::Vector3d::Zero(), 0.0, c, true).isZero(0.0));
  // Moving east the worst case is a headwind, the best case still air relative to the craft.
  const WindVector head = extremal_wind({2.0, 0.0, 0.0}, Eigen::Vector3d::Zero(), 8.0, c, true);
  CHECK(head.x() == doctest::Approx(-8.0).epsilon(1e-12));
  const WindVector calm = extremal_wind({2.0, 0.0, 0.0}, Eigen::Vector3d::Zero(), 8.0, c, false);
  CHECK((calm - WindVector(2.0, 0.0)).norm() <= 1e-3);
}

TEST_CASE("predictions are bit-for-bit repeatable") {
  HexGrid g(20.0, 15.0);
  const DesirablePath path = straight_five_hops(g);
  const Prediction a = predict_inputs(path, path.states[0], {1.0, -2.0}, PidGains{}, CraftParams{}, kTs);
  const Prediction b = predict_inputs(path, path.states[0], {1.0, -2.0}, PidGains{}, CraftParams{}, kTs);
  REQUIRE(a.inputs.size() == b.inputs.size());
  for (std::size_t k = 0; k < a.inputs.size(); ++k) CHECK(a.inputs[k] == b.inputs[k]);
  std::ostringstream sa, sb;
  write_prediction_csv(sa, a, kTs);
  write_prediction_csv(sb, b, kTs);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("clamping returns realizable inputs and flags saturation") {
  const CraftParams c;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> f(-5.0, 30.0), m(-0.05, 0.05);
  for (int i = 0; i < 500; ++i) {
    const InputVector u(f(rng), m(rng), m(rng), m(rng) * 0.1);
    const ControlOutput out = clamp_to_realizable(u, c);
    CHECK(realizable<double>(out.u, c));
    CHECK(out.saturated == !realizable<double>(u, c));
    if (!out.saturated) CHECK(out.u == u);
  }
}
