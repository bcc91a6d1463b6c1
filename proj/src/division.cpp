#include "uavroute/division.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "uavroute/disturbance.hpp"

namespace uavroute {

// ---- geometry -------------------------------------------------------------

double Circle::area() const { return M_PI * radius * radius; }

bool Circle::contains(const Position2D& p, double tol) const {
  return (p - center).norm() <= radius + tol * std::max(1.0, radius);
}

namespace {

Circle circle_from(const Position2D& a, const Position2D& b) {
  return {0.5 * (a + b), 0.5 * (a - b).norm()};
}

Circle circle_from(const Position2D& a, const Position2D& b, const Position2D& c) {
  const Position2D ab = b - a;
  const Position2D ac = c - a;
  const double det = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  const double scale = std::max({ab.squaredNorm(), ac.squaredNorm(), 1e-300});
  if (std::abs(det) <= 1e-12 * scale) {
    // Collinear: the two farthest-apart points span the circle.
    Circle best = circle_from(a, b);
    for (const Circle& c2 : {circle_from(a, c), circle_from(b, c)}) {
      if (c2.radius > best.radius) best = c2;
    }
    return best;
  }
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  const Position2D offset((ac.y() * ab2 - ab.y() * ac2) / det, (ab.x() * ac2 - ac.x() * ab2) / det);
  return {a + offset, offset.norm()};
}

}  // namespace

Circle minimum_enclosing_circle(std::span<const Position2D> pts) {
  if (pts.empty()) return {};
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (c.contains(pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(pts[j])) continue;
      c = circle_from(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!c.contains(pts[k])) c = circle_from(pts[i], pts[j], pts[k]);
      }
    }
  }
  return c;
}

TourEstimate tour_length_estimate(std::span<const Position2D> node_positions, const Position2D& own_pos,
                                  double c) {
  TourEstimate est;
  est.n = node_positions.size() + 1;
  if (est.n == 1) return est;
  std::vector<Position2D> pts;
  pts.reserve(est.n);
  pts.push_back(own_pos);
  pts.insert(pts.end(), node_positions.begin(), node_positions.end());
  est.circ_area_m2 = minimum_enclosing_circle(pts).area();
  est.est_length = c * std::sqrt(static_cast<double>(est.n) * est.circ_area_m2);
  return est;
}

// ---- phase 1 ----------------------------------------------------------------

namespace {

EnergyJ leg(const Position2D& from, const Position2D& to, const DivisionParams& p, bool worst) {
  const Eigen::Vector2d delta = to - from;
  if (delta.norm() == 0.0) return EnergyJ(0.0);
  const WindVector d = p.wind_cap > 0.0 ? (worst ? worst_case_wind(p.wind_cap, delta) : best_case_wind(p.wind_cap, delta))
                                        : WindVector::Zero();
  return travel_energy<double>(from, to, d, p.craft);
}

}  // namespace

EnergyJ worst_case_leg(const Position2D& from, const Position2D& to, const DivisionParams& p) {
  return leg(from, to, p, true);
}

EnergyJ best_case_leg(const Position2D& from, const Position2D& to, const DivisionParams& p) {
  return leg(from, to, p, false);
}

GoalSet phase1_claim(UavId agent, const std::set<NodeId>& unvisited, const std::map<UavId, Position2D>& positions,
                     const HexGrid& grid, const DivisionParams& params) {
  GoalSet out{agent, {}};
  const auto self = positions.find(agent);
  if (self == positions.end()) throw std::invalid_argument("phase1_claim: agent position unknown");
  const Position2D& pa = self->second;

  std::vector<std::tuple<double, NodeId>> order;
  order.reserve(unvisited.size());
  for (NodeId v : unvisited) order.emplace_back((grid.node_position(v) - pa).norm(), v);
  std::sort(order.begin(), order.end());

  double claimed_max = 0.0;
  for (const auto& [dist, v] : order) {
    const Position2D pv = grid.node_position(v);
    const EnergyJ e_max = worst_case_leg(pa, pv, params);
    if (!e_max.feasible()) continue;
    const double lhs = 2.0 * (claimed_max + e_max.joules());
    bool ok = true;
    for (const auto& [other, po] : positions) {
      if (other == agent) continue;
      if (!(lhs < best_case_leg(po, pv, params).joules())) {
        ok = false;
        break;
      }
    }
    if (ok) {
      out.nodes.insert(v);
      claimed_max += e_max.joules();
    }
  }
  return out;
}

// ---- phase 2 ----------------------------------------------------------------

namespace {

std::vector<Position2D> positions_of(const std::set<NodeId>& ids, const HexGrid& grid) {
  std::vector<Position2D> out;
  out.reserve(ids.size() + 1);
  for (NodeId v : ids) out.push_back(grid.node_position(v));
  return out;
}

}  // namespace

std::map<NodeId, Bid> compute_bids(const GoalSet& own, const std::set<NodeId>& leftover, const Position2D& own_pos,
                                   const HexGrid& grid, double tour_constant) {
  std::vector<Position2D> pts = positions_of(own.nodes, grid);
  const double base = tour_length_estimate(pts, own_pos, tour_constant).est_length;
  std::map<NodeId, Bid> bids;
  for (NodeId v : leftover) {
    pts.push_back(grid.node_position(v));
    const double with = tour_length_estimate(pts, own_pos, tour_constant).est_length;
    pts.pop_back();
    bids.emplace(v, static_cast<Bid>(std::llround((with - base) * kBidScale)));
  }
  return bids;
}

GoalSet assign_from_bids(GoalSet own, const std::map<UavId, std::map<NodeId, Bid>>& all_bids) {
  std::map<NodeId, std::pair<Bid, UavId>> best;
  for (const auto& [uav, bids] : all_bids) {
    for (const auto& [node, bid] : bids) {
      auto [it, inserted] = best.emplace(node, std::pair{bid, uav});
      if (!inserted && std::pair{bid, uav} < it->second) it->second = {bid, uav};
    }
  }
  for (const auto& [node, winner] : best) {
    if (winner.second == own.owner) own.nodes.insert(node);
  }
  return own;
}

// ---- wire format ------------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "UAVR/1";

const char* kind_name(DivisionMessage::Kind k) {
  switch (k) {
    case DivisionMessage::Kind::Hello: return "HELLO";
    case DivisionMessage::Kind::Claims: return "CLAIMS";
    case DivisionMessage::Kind::Bids: return "BIDS";
    case DivisionMessage::Kind::Gossip: return "GOSSIP";
  }
  return "?";
}

std::string join_ids(const std::set<NodeId>& ids) {
  if (ids.empty()) return "-";
  std::string s;
  for (NodeId v : ids) {
    if (!s.empty()) s += ',';
    s += std::to_string(v.value);
  }
  return s;
}

template <typename T>
T parse_int(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("malformed integer in message: '" + std::string(s) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::set<NodeId> parse_ids(std::string_view s) {
  std::set<NodeId> ids;
  if (s == "-") return ids;
  for (std::string_view p : split(s, ',')) ids.insert(NodeId{parse_int<std::int32_t>(p)});
  return ids;
}

}  // namespace

std::string encode(const DivisionMessage& m) {
  std::string out(kMagic);
  out += ' ';
  out += kind_name(m.kind);
  switch (m.kind) {
    case DivisionMessage::Kind::Hello: {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %.17g %.17g ", m.position.x(), m.position.y());
      out += buf;
      out += join_ids(m.nodes);
      break;
    }
    case DivisionMessage::Kind::Claims:
    case DivisionMessage::Kind::Gossip:
      out += ' ';
      out += join_ids(m.nodes);
      break;
    case DivisionMessage::Kind::Bids: {
      out += ' ';
      if (m.bids.empty()) {
        out += '-';
        break;
      }
      bool first = true;
      for (const auto& [v, bid] : m.bids) {
        if (!first) out += ',';
        first = false;
        out += std::to_string(v.value) + ':' + std::to_string(bid);
      }
      break;
    }
  }
  return out;
}

DivisionMessage decode(std::string_view text) {
  const std::vector<std::string_view> f = split(text, ' ');
  if (f.size() < 3 || f[0] != kMagic) throw std::invalid_argument("not a UAVR/1 message");
  DivisionMessage m;
  if (f[1] == "HELLO") {
    if (f.size() != 5) throw std::invalid_argument("HELLO expects position and visited set");
    m.kind = DivisionMessage::Kind::Hello;
    m.position = {std::stod(std::string(f[2])), std::stod(std::string(f[3]))};
    m.nodes = parse_ids(f[4]);
    return m;
  }
  if (f.size() != 3) throw std::invalid_argument("unexpected field count");
  if (f[1] == "CLAIMS" || f[1] == "GOSSIP") {
    m.kind = f[1] == "CLAIMS" ? DivisionMessage::Kind::Claims : DivisionMessage::Kind::Gossip;
    m.nodes = parse_ids(f[2]);
  } else if (f[1] == "BIDS") {
    m.kind = DivisionMessage::Kind::Bids;
    if (f[2] != "-") {
      for (std::string_view item : split(f[2], ',')) {
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) throw std::invalid_argument("bid entry without ':'");
        m.bids.emplace(NodeId{parse_int<std::int32_t>(item.substr(0, colon))},
                       parse_int<Bid>(item.substr(colon + 1)));
      }
    }
  } else {
    throw std::invalid_argument("unknown message kind '" + std::string(f[1]) + "'");
  }
  return m;
}

// ---- session ----------------------------------------------------------------

namespace {

DivisionMessage expect(const std::string& payload, DivisionMessage::Kind kind) {
  DivisionMessage m = decode(payload);
  if (m.kind != kind) throw ProtocolViolationError("unexpected message kind in division round");
  return m;
}

}  // namespace

DivisionSession::DivisionSession(UavId self, Position2D position, std::set<NodeId> visited_local,
                                 const HexGrid& grid, const DivisionParams& params)
    : self_(self), position_(std::move(position)), grid_(&grid), params_(params),
      visited_(std::move(visited_local)), phase1_{self, {}}, current_{self, {}} {}

std::string DivisionSession::hello() const {
  DivisionMessage m;
  m.kind = DivisionMessage::Kind::Hello;
  m.position = position_;
  m.nodes = visited_;
  return encode(m);
}

std::string DivisionSession::on_hello(const DivisionBus::Inbox& inbox) {
  positions_.clear();
  for (const auto& [uav, payload] : inbox) {
    const DivisionMessage m = expect(payload, DivisionMessage::Kind::Hello);
    positions_[uav] = m.position;
    visited_.insert(m.nodes.begin(), m.nodes.end());
  }
  unvisited_.clear();
  for (const auto& [v, h] : grid_->nodes()) {
    if (!visited_.count(v)) unvisited_.insert(v);
  }
  phase1_ = phase1_claim(self_, unvisited_, positions_, *grid_, params_);
  DivisionMessage out;
  out.kind = DivisionMessage::Kind::Claims;
  out.nodes = phase1_.nodes;
  return encode(out);
}

std::string DivisionSession::on_claims(const DivisionBus::Inbox& inbox) {
  std::set<NodeId> claimed;
  for (const auto& [uav, payload] : inbox) {
    for (NodeId v : expect(payload, DivisionMessage::Kind::Claims).nodes) {
      if (!claimed.insert(v).second) throw ProtocolViolationError("node claimed twice in phase 1");
    }
  }
  leftover_.clear();
  std::set_difference(unvisited_.begin(), unvisited_.end(), claimed.begin(), claimed.end(),
                      std::inserter(leftover_, leftover_.end()));
  current_ = phase1_;
  DivisionMessage out;
  out.kind = DivisionMessage::Kind::Bids;
  out.bids = compute_bids(current_, leftover_, position_, *grid_, params_.tour_constant);
  return encode(out);
}

GoalSet DivisionSession::on_bids(const DivisionBus::Inbox& inbox) {
  std::map<UavId, std::map<NodeId, Bid>> all;
  for (const auto& [uav, payload] : inbox) all[uav] = expect(payload, DivisionMessage::Kind::Bids).bids;
  current_ = assign_from_bids(current_, all);
  return current_;
}

DivisionOutcome run_division_lockstep(const std::vector<DivisionInput>& inputs, DivisionBus& bus,
                                      const HexGrid& grid, const DivisionParams& params) {
  std::map<UavId, DivisionSession> sessions;
  for (const auto& in : inputs) sessions.try_emplace(in.agent, in.agent, in.position, in.visited, grid, params);
  if (sessions.size() != bus.size()) throw MembershipError("division inputs do not match bus membership");

  auto round = [&](auto&& payload_of) {
    std::uint64_t r = 0;
    for (auto& [uav, s] : sessions) r = bus.post(uav, payload_of(s));
    return bus.collect(sessions.begin()->first, r);
  };

  auto inbox = round([](DivisionSession& s) { return s.hello(); });
  auto claims = round([&](DivisionSession& s) { return s.on_hello(*inbox); });
  auto bids = round([&](DivisionSession& s) { return s.on_claims(*claims); });

  DivisionOutcome out;
  for (auto& [uav, s] : sessions) {
    out.goal_sets[uav] = s.on_bids(*bids);
    out.phase1[uav] = s.phase1();
    out.unvisited = s.unvisited();
  }
  return out;
}

GoalSet run_division_blocking(const DivisionInput& input, DivisionBus& bus, const HexGrid& grid,
                              const DivisionParams& params) {
  DivisionSession s(input.agent, input.position, input.visited, grid, params);
  const auto hellos = bus.broadcast_and_gather(input.agent, s.hello());
  const auto claims = bus.broadcast_and_gather(input.agent, s.on_hello(hellos));
  const auto bids = bus.broadcast_and_gather(input.agent, s.on_claims(claims));
  return s.on_bids(bids);
}

std::set<NodeId> gossip_visited(UavId agent, const std::set<NodeId>& visited, DivisionBus& bus) {
  DivisionMessage m;
  m.kind = DivisionMessage::Kind::Gossip;
  m.nodes = visited;
  std::set<NodeId> merged = visited;
  for (const auto& [uav, payload] : bus.broadcast_and_gather(agent, encode(m))) {
    const auto got = expect(payload, DivisionMessage::Kind::Gossip).nodes;
    merged.insert(got.begin(), got.end());
  }
  return merged;
}

std::map<UavId, std::set<NodeId>> gossip_visited_lockstep(const std::map<UavId, std::set<NodeId>>& visited,
                                                          DivisionBus& bus) {
  std::uint64_t r = 0;
  for (const auto& [uav, set] : visited) {
    DivisionMessage m;
    m.kind = DivisionMessage::Kind::Gossip;
    m.nodes = set;
    r = bus.post(uav, encode(m));
  }
  std::map<UavId, std::set<NodeId>> out;
  for (const auto& [uav, set] : visited) {
    std::set<NodeId> merged = set;
    for (const auto& [sender, payload] : *bus.collect(uav, r)) {
      const auto got = expect(payload, DivisionMessage::Kind::Gossip).nodes;
      merged.insert(got.begin(), got.end());
    }
    out[uav] = std::move(merged);
  }
  return out;
}

}  // namespace uavroute
