#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uavroute/hexgrid.hpp"
#include "uavroute/msgbus.hpp"
#include "uavroute/quadrotor.hpp"

namespace uavroute {

struct Circle {
  Position2D center = Position2D::Zero();
  double radius = 0.0;

  double area() const;
  bool contains(const Position2D& p, double tol = 1e-9) const;
};

/// Smallest circle enclosing every point (incremental Welzl construction).
Circle minimum_enclosing_circle(std::span<const Position2D> points);

struct TourEstimate {
  double circ_area_m2 = 0.0;
  double est_length = 0.0;
  std::size_t n = 1;
};

/// Tour length through the agent's position and the given nodes, estimated
/// as c * sqrt(n * A) where A is the area of their enclosing circle.
TourEstimate tour_length_estimate(std::span<const Position2D> node_positions, const Position2D& own_pos,
                                  double c);

struct GoalSet {
  UavId owner;
  std::set<NodeId> nodes;
};

struct DivisionParams {
  double tour_constant = 0.7124;
  double wind_cap = 0.0;
  CraftParams craft{};
};

/// Straight-line energy with the wind at the cap blowing against the travel
/// direction (worst) or along it (best).
EnergyJ worst_case_leg(const Position2D& from, const Position2D& to, const DivisionParams& p);
EnergyJ best_case_leg(const Position2D& from, const Position2D& to, const DivisionParams& p);

/// Distance-ordered claims made without communication. A node is kept when
/// twice the worst-case energy to every node claimed so far plus this one is
/// still below each other agent's best-case energy to it.
GoalSet phase1_claim(UavId agent, const std::set<NodeId>& unvisited, const std::map<UavId, Position2D>& positions,
                     const HexGrid& grid, const DivisionParams& params);

// Bids are fixed-point (1e-6 m) so every agent computes the same argmin.
using Bid = std::int64_t;
inline constexpr double kBidScale = 1e6;

std::map<NodeId, Bid> compute_bids(const GoalSet& own, const std::set<NodeId>& leftover, const Position2D& own_pos,
                                   const HexGrid& grid, double tour_constant);

/// Adds every leftover node whose bid from `own.owner` is the minimum, with
/// ties going to the smallest UavId.
GoalSet assign_from_bids(GoalSet own, const std::map<UavId, std::map<NodeId, Bid>>& all_bids);

// ---- wire format ---------------------------------------------------------

/// Messages exchanged during division and visited-set gossip. Text encoding,
/// one line, versioned:
///
///   UAVR/1 HELLO <x> <y> <visited ids, comma separated or '-'>
///   UAVR/1 CLAIMS <claimed ids or '-'>
///   UAVR/1 BIDS <id>:<bid>,... or '-'
///   UAVR/1 GOSSIP <visited ids or '-'>
///
/// Coordinates use round-trip precision; bids are integer micrometers.
struct DivisionMessage {
  enum class Kind { Hello, Claims, Bids, Gossip };
  Kind kind = Kind::Hello;
  Position2D position = Position2D::Zero();
  std::set<NodeId> nodes;
  std::map<NodeId, Bid> bids;
};

std::string encode(const DivisionMessage& m);
DivisionMessage decode(std::string_view text);

using DivisionBus = RoundBus<std::string>;

/// Per-agent state of the three-round division protocol. Each method consumes
/// the previous round's inbox and returns the next payload to broadcast.
class DivisionSession {
 public:
  DivisionSession(UavId self, Position2D position, std::set<NodeId> visited_local, const HexGrid& grid,
                  const DivisionParams& params);

  std::string hello() const;
  std::string on_hello(const DivisionBus::Inbox& inbox);
  std::string on_claims(const DivisionBus::Inbox& inbox);
  GoalSet on_bids(const DivisionBus::Inbox& inbox);

  const std::set<NodeId>& unvisited() const { return unvisited_; }
  const std::set<NodeId>& merged_visited() const { return visited_; }
  const GoalSet& phase1() const { return phase1_; }
  const std::set<NodeId>& leftover() const { return leftover_; }

 private:
  UavId self_;
  Position2D position_;
  const HexGrid* grid_;
  DivisionParams params_;
  std::set<NodeId> visited_;
  std::set<NodeId> unvisited_;
  std::map<UavId, Position2D> positions_;
  GoalSet phase1_;
  GoalSet current_;
  std::set<NodeId> leftover_;
};

struct DivisionInput {
  UavId agent;
  Position2D position;
  std::set<NodeId> visited;
};

struct DivisionOutcome {
  std::map<UavId, GoalSet> goal_sets;
  std::map<UavId, GoalSet> phase1;
  std::set<NodeId> unvisited;
};

/// Runs the protocol for all agents on one thread, stepping them in UavId
/// order each round.
DivisionOutcome run_division_lockstep(const std::vector<DivisionInput>& inputs, DivisionBus& bus,
                                      const HexGrid& grid, const DivisionParams& params);

/// Runs the protocol for a single agent, blocking on the bus each round.
GoalSet run_division_blocking(const DivisionInput& input, DivisionBus& bus, const HexGrid& grid,
                              const DivisionParams& params);

/// One gossip round: every agent shares its visited set, all receive the union.
std::set<NodeId> gossip_visited(UavId agent, const std::set<NodeId>& visited, DivisionBus& bus);

/// Lockstep variant for a single-threaded scheduler.
std::map<UavId, std::set<NodeId>> gossip_visited_lockstep(const std::map<UavId, std::set<NodeId>>& visited,
                                                          DivisionBus& bus);

}  // namespace uavroute
