// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uavroute/astar.hpp"
#include "uavroute/division.hpp"
#include "uavroute/harness.hpp"
#include "uavroute/mission.hpp"
#include "uavroute/pid.hpp"
#include "uavroute/scenario.hpp"

using namespace uavroute;

namespace {

// Pinned thresholds.
constexpr int kRuns = 20;
constexpr double kSavingsLow = 0.10;
constexpr double kSavingsHigh = 0.40;
constexpr double kNdMinImprovement = 0.05;
constexpr double kRuntimeLimitS = 600.0;
constexpr int kOracleGrids = 200;
constexpr double kOracleTol = 1e-9;
constexpr int kDivisionInstances = 500;
constexpr int kSandwichPaths = 100;
constexpr double kRotationTol = 1e-9;
constexpr double kTrackingTol = 0.1;

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig reference_config(Area area) {
  ExperimentConfig cfg;
  cfg.scenario.width_m = area.width;
  cfg.scenario.height_m = area.height;
  cfg.scenario.n_nodes = 30;
  cfg.scenario.n_uavs = 4;
  cfg.scenario.wind_speed = 2.0;
  cfg.nd_period = 10.0;
  cfg.online_replanning = true;
  cfg.runs = kRuns;
  cfg.seed = 1;
  return cfg;
}

// Runs that failed for any reason: invariant violation, timeout, or exception.
struct ValidityTally {
  int runs = 0;
  int bad = 0;
  std::string first_error;

  void add(const BatchResult& b) {
    for (const auto& r : b.rows) {
      ++runs;
      if (!r.ok) {
        ++bad;
        if (first_error.empty()) first_error = r.error;
      }
    }
  }
  void add(const MissionResult& m) {
    ++runs;
    if (!m.ok()) {
      ++bad;
      if (first_error.empty()) first_error = m.violations.empty() ? "timed out" : m.violations.front();
    }
  }
};

ValidityTally validity;
ComparisonResult small_comparison;
BatchResult nd10_small;

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const ComparisonResult c = compare(reference_config(kSmallArea));
  const double elapsed = seconds_since(t0);
  validity.add(c.algorithm);
  validity.add(c.greedy);
  small_comparison = c;
  nd10_small = c.algorithm;
  const bool pass = c.algorithm.failures == 0 && c.greedy.failures == 0 && c.algorithm.mean_J <= c.greedy.mean_J &&
                    c.savings >= kSavingsLow && c.savings <= kSavingsHigh && elapsed < kRuntimeLimitS;
  report(1, pass,
         fmt("52x30, 4 UAVs, 30 nodes, low wind, ND 10 s, %d runs: algorithm %.1f J vs greedy %.1f J, savings %.1f%% "
             "(band %.0f-%.0f%%), %.0f s",
             kRuns, c.algorithm.mean_J, c.greedy.mean_J, 100 * c.savings, 100 * kSavingsLow, 100 * kSavingsHigh,
             elapsed));
}

void criterion_2() {
  bool pass = true;
  std::string detail;
  for (Area area : {kSmallArea, kMediumArea, kLargeArea}) {
    const bool small = area.width == kSmallArea.width && area.height == kSmallArea.height;
    const ComparisonResult c = small ? small_comparison : compare(reference_config(area));
    if (!small) {
      validity.add(c.algorithm);
      validity.add(c.greedy);
    }
    pass = pass && c.algorithm.failures == 0 && c.greedy.failures == 0 && c.savings >= kSavingsLow &&
           c.savings <= kSavingsHigh;
    detail += fmt("%s%.0fx%.0f %.1f%%", detail.empty() ? "" : ", ", area.width, area.height, 100 * c.savings);
  }
  report(2, pass, "savings vs greedy by area: " + detail);
}

void criterion_3() {
  ExperimentConfig cfg = reference_config(kSmallArea);
  cfg.nd_period = 80.0;
  const BatchResult nd80 = run_batch(cfg);
  validity.add(nd80);
  const double improvement = 1.0 - nd10_small.mean_J / nd80.mean_J;
  const bool pass = nd80.failures == 0 && nd10_small.failures == 0 && nd10_small.mean_J < nd80.mean_J &&
                    improvement >= kNdMinImprovement;
  report(3, pass,
         fmt("ND 10 s %.1f J vs ND 80 s %.1f J over %d runs: %.1f%% better (need >= %.0f%%)", nd10_small.mean_J,
             nd80.mean_J, kRuns, 100 * improvement, 100 * kNdMinImprovement));
}

void criterion_4() {
  const Scenario s = load_scenario(UAVROUTE_SOURCE_DIR "/scenarios/replanning_case.json");
  const HexGrid g = s.build_grid();
  MissionConfig on;
  on.nd_period.reset();
  MissionConfig off = on;
  off.online_replanning = false;
  const MissionResult r_on = run_mission(g, s.wind, on, PolicyKind::Algorithm1);
  const MissionResult r_off = run_mission(g, s.wind, off, PolicyKind::Algorithm1);
  validity.add(r_on);
  validity.add(r_off);
  int switches = 0;
  for (const auto& e : r_on.events) switches += e.kind == "switch";
  const bool pass = r_on.ok() && r_off.ok() && r_on.total_travel_energy_J < r_off.total_travel_energy_J;
  report(4, pass,
         fmt("2 UAVs, 8 m/s wind event: OP on %.1f J (%d goal switch%s) vs OP off %.1f J", r_on.total_travel_energy_J,
             switches, switches == 1 ? "" : "es", r_off.total_travel_energy_J));
}

void criterion_5() {
  const CraftParams c;
  std::mt19937_64 rng(5005);
  std::uniform_int_distribution<int> dim(2, 12), n_obs(0, 20);
  int agree = 0, reachable = 0;
  double worst = 0.0;
  for (int i = 0; i < kOracleGrids; ++i) {
    HexGrid g = oracle::grid_with(dim(rng), dim(rng));
    std::vector<HexCoord> hexes = g.all_hexes();
    std::shuffle(hexes.begin(), hexes.end(), rng);
    const int obstacles = std::min<int>(n_obs(rng), static_cast<int>(hexes.size()) - 2);
    for (int k = 0; k < obstacles; ++k) g.add_obstacle(hexes[2 + static_cast<std::size_t>(k)]);
    const WindVector d = oracle::random_in_disk(rng, 8.0);
    auto w = [&](HexCoord a, HexCoord b) {
      return travel_energy<double>(g.center_position(a), g.center_position(b), d, c).joules();
    };
    const auto route = search_hex_route(g, hexes[0], hexes[1], d, c);
    const auto best = oracle::dijkstra(g, hexes[0], hexes[1], w);
    if (route.has_value() != best.has_value()) continue;
    if (!route) {
      ++agree;
      continue;
    }
    ++reachable;
    const double err = std::abs(route->cost.joules() - *best);
    worst = std::max(worst, err);
    if (err <= kOracleTol) ++agree;
  }
  report(5, agree == kOracleGrids,
         fmt("%d/%d random grids match the Dijkstra oracle (%d reachable), max error %.2e J", agree, kOracleGrids,
             reachable, worst));
}

void criterion_6() {
  std::mt19937_64 rng(6006);
  std::uniform_int_distribution<int> n_agents(1, 8), n_nodes(0, 50);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int good = 0;
  for (int i = 0; i < kDivisionInstances; ++i) {
    const double w = 20.0 + 90.0 * u01(rng), h = 15.0 + 50.0 * u01(rng);
    HexGrid g(w, h);
    std::vector<HexCoord> hexes = g.all_hexes();
    std::shuffle(hexes.begin(), hexes.end(), rng);
    const int nodes = std::min<int>(n_nodes(rng), static_cast<int>(hexes.size()));
    for (int k = 0; k < nodes; ++k) g.add_node(NodeId{k + 1}, hexes[static_cast<std::size_t>(k)]);
    std::vector<DivisionInput> inputs;
    std::vector<UavId> members;
    std::set<NodeId> visited;
    const int agents = n_agents(rng);
    for (int a = 1; a <= agents; ++a) {
      DivisionInput in{UavId{a}, Position2D(u01(rng) * w, u01(rng) * h), {}};
      for (int v = 1; v <= nodes; ++v) {
        if (u01(rng) < 0.15) in.visited.insert(NodeId{v});
      }
      visited.insert(in.visited.begin(), in.visited.end());
      members.push_back(in.agent);
      inputs.push_back(std::move(in));
    }
    DivisionParams params;
    params.wind_cap = std::array{0.0, 2.0, 8.0}[static_cast<std::size_t>(i % 3)];
    DivisionBus bus(members);
    const DivisionOutcome out = run_division_lockstep(inputs, bus, g, params);

    std::set<NodeId> expected;
    for (const auto& [v, hex] : g.nodes()) {
      if (!visited.count(v)) expected.insert(v);
    }
    std::set<NodeId> seen;
    std::size_t total = 0;
    for (const auto& [a, s] : out.goal_sets) {
      total += s.nodes.size();
      seen.insert(s.nodes.begin(), s.nodes.end());
    }
    if (total == seen.size() && seen == expected) ++good;
  }
  report(6, good == kDivisionInstances,
         fmt("%d/%d random division instances are disjoint and cover every unvisited node", good,
             kDivisionInstances));
}

void criterion_7() {
  const Scenario s = load_scenario(UAVROUTE_SOURCE_DIR "/scenarios/obstacle_field.json");
  const HexGrid g = s.build_grid();
  for (PolicyKind p : {PolicyKind::Algorithm1, PolicyKind::Greedy}) validity.add(run_mission(g, s.wind, {}, p));
  report(7, validity.bad == 0 && validity.runs > 0,
         fmt("%d/%d completed simulations satisfy every plan-record invariant%s%s", validity.runs - validity.bad,
             validity.runs, validity.first_error.empty() ? "" : "; first failure: ", validity.first_error.c_str()));
}

void criterion_8() {
  const CraftParams c;
  std::mt19937_64 rng(8008);

  int ordered = 0;
  HexGrid g(30.0, 20.0);
  const std::vector<HexCoord> hexes = g.all_hexes();
  std::uniform_int_distribution<std::size_t> pick(0, hexes.size() - 1);
  g.add_node(NodeId{1}, hexes[pick(rng)]);
  for (int i = 0; i < kSandwichPaths; ++i) {
    const double cap = (i % 2) ? 8.0 : 2.0;
    const WindVector d = oracle::random_in_disk(rng, cap);
    HexCoord from = hexes[pick(rng)];
    while (from == g.node_hex(NodeId{1})) from = hexes[pick(rng)];
    const auto path = plan_path(g, g.center_position(from), NodeId{1}, d, c);
    if (!path) continue;
    const EnergyTriple t = predict_energy_triple(*path, path->states[0], d, cap, PidGains{}, c, kDefaultSamplePeriod);
    if (t.min.joules() <= t.predicted.joules() && t.predicted.joules() <= t.max.joules()) ++ordered;
  }

  bool theta_max_at_pi = true;
  for (double speed : {2.0, 8.0}) {
    double best = -1.0, best_theta = -1.0;
    for (int k = 0; k <= 720; ++k) {
      const double theta = oracle::kPi * k / 720.0;
      const double e = travel_energy<double>({0, 0}, {10, 0}, speed * WindVector(std::cos(theta), std::sin(theta)), c)
                           .joules();
      if (e > best) best = e, best_theta = theta;
    }
    theta_max_at_pi = theta_max_at_pi && best_theta == oracle::kPi * 720 / 720.0;
  }

  double worst_rot = 0.0;
  std::uniform_real_distribution<double> coord(-30.0, 30.0), ang(0.0, 2 * oracle::kPi);
  for (int i = 0; i < 1000; ++i) {
    const Position2D p(coord(rng), coord(rng)), q(coord(rng), coord(rng));
    const WindVector d = oracle::random_in_disk(rng, 8.0);
    const Eigen::Rotation2Dd rot(ang(rng));
    const double e1 = travel_energy<double>(p, q, d, c).joules();
    const double e2 = travel_energy<double>(rot * p, rot * q, rot * d, c).joules();
    worst_rot = std::max(worst_rot, std::abs(e1 - e2) / e1);
  }

  report(8, ordered == kSandwichPaths && theta_max_at_pi && worst_rot <= kRotationTol,
         fmt("triple ordered on %d/%d paths; hop energy maximal at theta = pi: %s; rotation error %.1e", ordered,
             kSandwichPaths, theta_max_at_pi ? "yes" : "no", worst_rot));
}

void criterion_9() {
  HexGrid g(20.0, 15.0);
  g.add_node(NodeId{1}, {3, 6});
  const auto path = plan_path(g, g.center_position({3, 1}), NodeId{1}, {0.0, 0.0}, CraftParams{});
  bool pass = path.has_value() && path->hexes.size() == 6;
  double err = -1.0;
  bool saturated = true;
  if (pass) {
    const Prediction p = predict_inputs(*path, path->states[0], {0.0, 0.0}, PidGains{}, CraftParams{},
                                        kDefaultSamplePeriod);
    const Position2D goal = g.node_position(NodeId{1});
    err = (p.states.back().p - Eigen::Vector3d(goal.x(), goal.y(), 0.0)).norm();
    saturated = p.saturated;
    pass = err < kTrackingTol && !saturated;
  }
  report(9, pass, fmt("5-hop straight path, calm air: terminal error %.4f m (limit %.1f), saturation %s", err,
                      kTrackingTol, saturated ? "yes" : "no"));
}

void criterion_10() {
  const double ts = kDefaultSamplePeriod;
  bool pass = true;
  long long windy = 0, calm = 0;
  for (double speed : {2.0, 8.0}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const WindPattern p{speed, 30.0, 40.0, seed};
      const TimeIndex steps = std::llround(400.0 / ts);
      for (TimeIndex k = 0; k < steps; ++k) {
        const WindVector d = wind_at(p, k, ts);
        // Phase in whole sample steps, so the boundary at 30 s is exact.
        const bool should_blow = k % std::llround(40.0 / ts) < std::llround(30.0 / ts);
        if (should_blow) {
          ++windy;
          pass = pass && d.norm() == speed;
        } else {
          ++calm;
          pass = pass && d.isZero(0.0);
        }
      }
    }
  }
  report(10, pass,
         fmt("2 and 8 m/s patterns, 5 seeds, 10 cycles each: wind on exactly [0,30) s of every 40 s (%lld windy, "
             "%lld calm samples checked)",
             windy, calm));
}

void criterion_11() {
  ExperimentConfig cfg = reference_config(kSmallArea);
  std::ostringstream first, second;
  write_batch_csv(first, nd10_small);
  write_batch_csv(second, run_batch(cfg));
  report(11, first.str() == second.str() && !first.str().empty(),
         fmt("batch CSV for master seed %llu is byte-identical across two executions (%zu bytes)",
             static_cast<unsigned long long>(cfg.seed), first.str().size()));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria failed (%.0f s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
