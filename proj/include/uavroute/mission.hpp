#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uavroute/astar.hpp"
#include "uavroute/disturbance.hpp"
#include "uavroute/division.hpp"
#include "uavroute/hexgrid.hpp"
#include "uavroute/pid.hpp"
#include "uavroute/quadrotor.hpp"

namespace uavroute {

class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Global plan record: which node each UAV is heading to at every time index,
/// plus the index at which each node was visited. Choices are stored as
/// run-length segments; std::nullopt is the "no goal" value.
class PlanRecord {
 public:
  struct Segment {
    TimeIndex begin;  // inclusive
    TimeIndex end;    // exclusive
    std::optional<NodeId> node;
  };
  struct Visit {
    UavId uav;
    NodeId node;
    TimeIndex k;
  };

  void add_uav(UavId uav);
  /// Sets the choice of `uav` from index k onwards. Indices must not decrease.
  void set_choice(UavId uav, TimeIndex k, std::optional<NodeId> node);
  void record_visit(UavId uav, NodeId node, TimeIndex k);
  void finish(TimeIndex T);

  std::optional<NodeId> choice(UavId uav, TimeIndex k) const;
  const std::map<UavId, std::vector<Segment>>& segments() const { return segments_; }
  const std::vector<Visit>& visits() const { return visits_; }
  TimeIndex termination() const { return T_; }

  /// Returns a description of every broken invariant; empty when valid.
  ///  (i) no two UAVs hold the same node at the same index,
  ///  (ii) every node of `all_nodes` is visited,
  ///  (iii) no node is visited twice,
  ///  (iv) every UAV ends with no goal by index T.
  std::vector<std::string> check(const std::set<NodeId>& all_nodes) const;

  bool operator==(const PlanRecord&) const = default;

 private:
  std::map<UavId, std::vector<Segment>> segments_;
  std::vector<Visit> visits_;
  TimeIndex T_ = 0;
};

bool operator==(const PlanRecord::Segment& a, const PlanRecord::Segment& b);
bool operator==(const PlanRecord::Visit& a, const PlanRecord::Visit& b);

/// Minimum predicted energy over the goal set, ties by smallest NodeId.
/// Infeasible triples are skipped; nullopt when nothing is feasible.
std::optional<NodeId> select_goal(const std::set<NodeId>& goal_set, const std::map<NodeId, EnergyTriple>& triples);

inline constexpr double kRiskEpsilon = 1e-9;

/// Risk that `v` overtakes the current goal as the cheapest node.
double risk_number(const EnergyTriple& goal, const EnergyTriple& v);

/// tau = alpha (1 + beta / r_max), clipped to [alpha, tau_cap]; r_max <= 0 gives tau_cap.
double replanning_interval(double r_max, double alpha, double beta, double tau_cap);

struct ReplanSchedule {
  double alpha = 1.0;
  double beta = 1.0;
  double tau_cap = 120.0;
  double tau = 120.0;
  TimeIndex next_plan = 0;

  /// Sets the next planning index from a planning pass at `k`.
  void advance(TimeIndex k, double r_max, double t_s);
};

enum class PolicyKind { Algorithm1, Greedy };

const char* to_string(PolicyKind p);

struct MissionConfig {
  double t_s = kDefaultSamplePeriod;
  double alpha = 1.0;
  double beta = 1.0;
  double tau_cap = 120.0;
  double gossip_period = 5.0;            // t_c
  std::optional<double> nd_period;       // periodic node division; nullopt = once at start
  bool online_replanning = true;
  double arrival_radius_frac = 0.25;     // of the hex side
  double arrival_speed = 0.1;            // m/s
  double tour_constant = 0.7124;
  double altitude = 10.0;
  double max_time_s = 3600.0;
  CraftParams craft{};
  PidGains gains{};
  TrajectoryLimits limits{};
};

struct MissionEvent {
  double t = 0.0;
  std::optional<UavId> uav;
  std::string kind;    // division, goal, switch, arrival, release, idle, timeout
  std::string detail;
};

/// Optional per-tick trace; one row per UAV every `stride` ticks.
struct TraceOptions {
  std::ostream* csv = nullptr;
  int stride = 20;
};

struct MissionResult {
  PlanRecord record;
  std::vector<MissionEvent> events;
  std::map<UavId, double> travel_energy_J;  // realized, over flying ticks only
  std::map<UavId, double> idle_energy_J;    // hover while without a goal, until T
  double total_travel_energy_J = 0.0;
  double total_idle_energy_J = 0.0;
  TimeIndex T = 0;
  bool timed_out = false;
  int divisions = 0;
  int planning_passes = 0;
  std::vector<std::string> violations;  // PlanRecord invariant failures

  bool ok() const { return violations.empty() && !timed_out; }
};

/// Runs the whole fleet on a lockstep world clock. UAVs start at rest over
/// their depots; the depot counts as visited at index 0. The decision policy
/// is the only thing that differs between Algorithm1 and Greedy; flight,
/// tracking control, and energy accounting are shared.
MissionResult run_mission(const HexGrid& grid, const WindModel& wind, const MissionConfig& config, PolicyKind policy,
                          const TraceOptions& trace = {});

void write_event_log(std::ostream& out, const std::vector<MissionEvent>& events);

}  // namespace uavroute
