#include "uavroute/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

namespace uavroute {

// ---- PlanRecord -------------------------------------------------------------

bool operator==(const PlanRecord::Segment& a, const PlanRecord::Segment& b) {
  return a.begin == b.begin && a.end == b.end && a.node == b.node;
}

bool operator==(const PlanRecord::Visit& a, const PlanRecord::Visit& b) {
  return a.uav == b.uav && a.node == b.node && a.k == b.k;
}

namespace {
constexpr TimeIndex kOpenEnd = std::numeric_limits<TimeIndex>::max();
}

void PlanRecord::add_uav(UavId uav) { segments_.try_emplace(uav); }

void PlanRecord::set_choice(UavId uav, TimeIndex k, std::optional<NodeId> node) {
  auto& segs = segments_.at(uav);
  if (!segs.empty()) {
    Segment& last = segs.back();
    if (k < last.begin) throw InternalConsistencyError("plan record choices must not go back in time");
    if (last.node == node) return;
    if (last.begin == k) {
      segs.pop_back();
      if (!segs.empty() && segs.back().node == node) {
        segs.back().end = kOpenEnd;
        return;
      }
    } else {
      last.end = k;
    }
  }
  segs.push_back({k, kOpenEnd, node});
}

void PlanRecord::record_visit(UavId uav, NodeId node, TimeIndex k) { visits_.push_back({uav, node, k}); }

void PlanRecord::finish(TimeIndex T) { T_ = T; }

std::optional<NodeId> PlanRecord::choice(UavId uav, TimeIndex k) const {
  const auto& segs = segments_.at(uav);
  auto it = std::upper_bound(segs.begin(), segs.end(), k, [](TimeIndex t, const Segment& s) { return t < s.begin; });
  if (it == segs.begin()) return std::nullopt;
  --it;
  return k < it->end ? it->node : std::nullopt;
}

std::vector<std::string> PlanRecord::check(const std::set<NodeId>& all_nodes) const {
  std::vector<std::string> out;
  auto fail = [&](const std::string& s) { out.push_back(s); };

  // (i) exclusive choice per index
  std::map<NodeId, std::vector<std::tuple<TimeIndex, TimeIndex, UavId>>> holders;
  for (const auto& [uav, segs] : segments_) {
    for (const auto& s : segs) {
      if (s.node) holders[*s.node].emplace_back(s.begin, s.end, uav);
    }
  }
  for (auto& [node, spans] : holders) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      const auto& [b0, e0, u0] = spans[i - 1];
      const auto& [b1, e1, u1] = spans[i];
      if (u0 != u1 && b1 < e0) {
        std::ostringstream msg;
        msg << "(i) " << node << " chosen by " << u0 << " and " << u1 << " at index " << b1;
        fail(msg.str());
      }
    }
  }

  // (ii), (iii) coverage and single visit
  std::map<NodeId, int> visit_count;
  for (const auto& v : visits_) {
    ++visit_count[v.node];
    if (v.k > 0 && choice(v.uav, v.k - 1) != v.node) {
      std::ostringstream msg;
      msg << "visit of " << v.node << " by " << v.uav << " at " << v.k << " was not its goal";
      fail(msg.str());
    }
  }
  for (NodeId n : all_nodes) {
    const auto it = visit_count.find(n);
    if (it == visit_count.end()) {
      std::ostringstream msg;
      msg << "(ii) " << n << " never visited";
      fail(msg.str());
    } else if (it->second > 1) {
      std::ostringstream msg;
      msg << "(iii) " << n << " visited " << it->second << " times";
      fail(msg.str());
    }
  }
  for (const auto& [node, count] : visit_count) {
    if (!all_nodes.count(node)) {
      std::ostringstream msg;
      msg << "visit of unknown " << node;
      fail(msg.str());
    }
  }

  // (iv) termination
  for (const auto& [uav, segs] : segments_) {
    if (choice(uav, T_).has_value()) {
      std::ostringstream msg;
      msg << "(iv) " << uav << " still has a goal at T=" << T_;
      fail(msg.str());
    }
  }
  return out;
}

// ---- goal selection and replanning -----------------------------------------

std::optional<NodeId> select_goal(const std::set<NodeId>& goal_set, const std::map<NodeId, EnergyTriple>& triples) {
  std::optional<NodeId> best;
  double best_j = std::numeric_limits<double>::infinity();
  for (NodeId v : goal_set) {
    const auto it = triples.find(v);
    if (it == triples.end()) throw InternalConsistencyError("no energy triple for a goal-set node");
    const EnergyJ& e = it->second.predicted;
    if (!e.feasible()) continue;
    if (!best || e.joules() < best_j) {
      best = v;
      best_j = e.joules();
    }
  }
  return best;
}

double risk_number(const EnergyTriple& goal, const EnergyTriple& v) {
  const double num = std::max(goal.max.joules() - v.min.joules(), 0.0);
  if (num == 0.0) return 0.0;
  const double den = std::max(v.max.joules() - goal.min.joules(), kRiskEpsilon);
  return num / den;
}

double replanning_interval(double r_max, double alpha, double beta, double tau_cap) {
  if (!(r_max > 0.0)) return tau_cap;
  return std::clamp(alpha * (1.0 + beta / r_max), alpha, tau_cap);
}

void ReplanSchedule::advance(TimeIndex k, double r_max, double t_s) {
  tau = replanning_interval(r_max, alpha, beta, tau_cap);
  next_plan = k + std::max<TimeIndex>(1, std::llround(tau / t_s));
}

const char* to_string(PolicyKind p) { return p == PolicyKind::Algorithm1 ? "algorithm1" : "greedy"; }

void write_event_log(std::ostream& out, const std::vector<MissionEvent>& events) {
  out << "t,uav,kind,detail\n";
  char buf[32];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof buf, "%.3f", e.t);
    out << buf << ',';
    if (e.uav) out << e.uav->value;
    out << ',' << e.kind << ',' << e.detail << '\n';
  }
}

// ---- simulation -------------------------------------------------------------

namespace {

std::string id_list(const std::set<NodeId>& ids) {
  std::string s;
  for (NodeId v : ids) {
    if (!s.empty()) s += ' ';
    s += std::to_string(v.value);
  }
  return s;
}

class Simulation;

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void start(Simulation& sim) = 0;
  virtual void tick(Simulation& sim, TimeIndex k, const std::vector<std::pair<UavId, NodeId>>& arrived) = 0;
  /// True when nothing further can happen without a UAV in the air.
  virtual bool stalled(const Simulation& sim) const = 0;
};

// Physical side of one UAV: state, the reference it tracks, and its ledger.
struct Craft {
  UavState x;
  std::optional<NodeId> goal;
  std::vector<UavState> reference;
  TimeIndex ref_start = 0;
  double travel_J = 0.0;
  TimeIndex idle_ticks = 0;
};

class Simulation {
 public:
  Simulation(const HexGrid& grid, const WindModel& wind, const MissionConfig& cfg, const TraceOptions& trace)
      : grid_(grid), wind_(wind), cfg_(cfg), trace_(trace), wind_cap_(wind_cap(wind)) {
    for (const auto& [uav, depot] : grid.depots()) {
      Craft c;
      c.x = UavState::at_rest(grid.node_position(depot), cfg.altitude);
      crafts_.emplace(uav, std::move(c));
      result_.record.add_uav(uav);
      result_.record.set_choice(uav, 0, std::nullopt);
      result_.record.record_visit(uav, depot, 0);
      visited_.insert(depot);
    }
    for (const auto& [v, h] : grid.nodes()) all_nodes_.insert(v);
    const double omega_h = std::sqrt(cfg.craft.weight() / (4.0 * cfg.craft.kappa_f));
    hover_power_ = 4.0 * cfg.craft.kappa_m * omega_h * omega_h * omega_h;
  }

  const HexGrid& grid() const { return grid_; }
  const MissionConfig& config() const { return cfg_; }
  double wind_cap_value() const { return wind_cap_; }
  WindVector wind(TimeIndex k) const { return wind_at(wind_, k, cfg_.t_s); }
  double time(TimeIndex k) const { return static_cast<double>(k) * cfg_.t_s; }

  std::vector<UavId> uavs() const {
    std::vector<UavId> out;
    for (const auto& [uav, c] : crafts_) out.push_back(uav);
    return out;
  }
  const UavState& state(UavId uav) const { return crafts_.at(uav).x; }
  std::optional<NodeId> goal(UavId uav) const { return crafts_.at(uav).goal; }
  bool flying(UavId uav) const { return crafts_.at(uav).goal.has_value(); }
  bool any_flying() const {
    return std::any_of(crafts_.begin(), crafts_.end(), [](const auto& kv) { return kv.second.goal.has_value(); });
  }
  const std::set<NodeId>& visited() const { return visited_; }
  const std::set<NodeId>& all_nodes() const { return all_nodes_; }

  std::optional<DesirablePath> plan(UavId uav, NodeId goal, TimeIndex k) const {
    const UavState& x = state(uav);
    return plan_path(grid_, x.xy(), goal, wind(k), cfg_.craft, cfg_.limits, cfg_.t_s, x.ground_velocity(),
                     cfg_.altitude);
  }

  void fly(UavId uav, NodeId goal, DesirablePath path, TimeIndex k) {
    Craft& c = crafts_.at(uav);
    if (c.goal != goal) log(k, uav, c.goal ? "switch" : "goal", std::to_string(goal.value));
    c.goal = goal;
    c.reference = std::move(path.states);
    c.ref_start = k;
    result_.record.set_choice(uav, k, goal);
  }

  void ground(UavId uav, TimeIndex k, const std::string& why) {
    Craft& c = crafts_.at(uav);
    if (!c.goal) return;
    c.goal.reset();
    c.reference.clear();
    // Hold position; the craft hovers in place until it gets a new goal.
    c.x.v.setZero();
    c.x.theta.setZero();
    c.x.omega.setZero();
    result_.record.set_choice(uav, k, std::nullopt);
    log(k, uav, "idle", why);
  }

  void log(TimeIndex k, std::optional<UavId> uav, std::string kind, std::string detail) {
    result_.events.push_back({time(k), uav, std::move(kind), std::move(detail)});
  }

  void count_division() { ++result_.divisions; }
  void count_plan() { ++result_.planning_passes; }

  MissionResult run(Policy& policy) {
    const TimeIndex max_k = static_cast<TimeIndex>(std::ceil(cfg_.max_time_s / cfg_.t_s));
    TimeIndex k = 0;
    policy.start(*this);
    while (true) {
      if (k > 0) {
        std::vector<std::pair<UavId, NodeId>> arrived;
        for (auto& [uav, c] : crafts_) {
          if (c.goal && has_arrived(c)) {
            const NodeId g = *c.goal;
            visited_.insert(g);
            result_.record.record_visit(uav, g, k);
            log(k, uav, "arrival", std::to_string(g.value));
            c.goal.reset();
            c.reference.clear();
            result_.record.set_choice(uav, k, std::nullopt);
            arrived.emplace_back(uav, g);
          }
        }
        policy.tick(*this, k, arrived);
      }
      write_trace(k);
      if (!any_flying() && (visited_ == all_nodes_ || policy.stalled(*this))) break;
      if (k >= max_k) {
        result_.timed_out = true;
        log(k, std::nullopt, "timeout", "simulation exceeded max_time_s");
        for (auto& [uav, c] : crafts_) ground(uav, k, "timeout");
        break;
      }
      for (auto& [uav, c] : crafts_) {
        if (c.goal) {
          step(c, k);
        } else {
          ++c.idle_ticks;
        }
      }
      ++k;
    }
    result_.T = k;
    result_.record.finish(k);
    for (auto& [uav, c] : crafts_) {
      result_.travel_energy_J[uav] = c.travel_J;
      result_.idle_energy_J[uav] = hover_power_ * cfg_.t_s * static_cast<double>(c.idle_ticks);
      result_.total_travel_energy_J += c.travel_J;
      result_.total_idle_energy_J += result_.idle_energy_J[uav];
    }
    result_.violations = result_.record.check(all_nodes_);
    return std::move(result_);
  }

 private:
  bool has_arrived(const Craft& c) const {
    const Position2D target = grid_.node_position(*c.goal);
    return (c.x.xy() - target).norm() <= cfg_.arrival_radius_frac * grid_.side() &&
           c.x.v.norm() < cfg_.arrival_speed;
  }

  void step(Craft& c, TimeIndex k) {
    const auto n = static_cast<TimeIndex>(c.reference.size());
    const TimeIndex idx = std::min(k - c.ref_start + 1, n - 1);
    const UavState& ref = c.reference[idx];
    Eigen::Vector3d ff = Eigen::Vector3d::Zero();
    if (k - c.ref_start + 1 < n && idx > 0) ff = (c.reference[idx].v - c.reference[idx - 1].v) / cfg_.t_s;
    const WindVector d = wind(k);
    const ControlOutput out = control_step(c.x, ref, ff, d, cfg_.gains, cfg_.craft);
    c.travel_J += rotor_power<double>(mixer_inverse<double>(out.u, cfg_.craft), cfg_.craft) * cfg_.t_s;
    c.x = step_dynamics<double>(c.x, out.u, d, cfg_.craft, cfg_.t_s);
  }

  void write_trace(TimeIndex k) {
    if (!trace_.csv || trace_.stride <= 0 || k % trace_.stride != 0) return;
    std::ostream& os = *trace_.csv;
    if (k == 0) os << "t,uav,x,y,goal,energy_J_cumulative\n";
    char buf[160];
    for (const auto& [uav, c] : crafts_) {
      std::snprintf(buf, sizeof buf, "%.3f,%d,%.4f,%.4f,", time(k), uav.value, c.x.p.x(), c.x.p.y());
      os << buf;
      if (c.goal) os << c.goal->value;
      std::snprintf(buf, sizeof buf, ",%.3f\n", c.travel_J);
      os << buf;
    }
  }

  const HexGrid& grid_;
  const WindModel& wind_;
  MissionConfig cfg_;
  TraceOptions trace_;
  double wind_cap_;
  double hover_power_ = 0.0;
  std::map<UavId, Craft> crafts_;
  std::set<NodeId> visited_;
  std::set<NodeId> all_nodes_;
  MissionResult result_;
};

TimeIndex steps_for(double seconds, double t_s) { return std::max<TimeIndex>(1, std::llround(seconds / t_s)); }

// ---- Algorithm 1 ---------------------------------------------------------------

class Algorithm1Policy final : public Policy {
 public:
  explicit Algorithm1Policy(const Simulation& sim) : bus_(sim.uavs()), release_limit_(sim.uavs().size()) {
    const auto& cfg = sim.config();
    gossip_steps_ = steps_for(cfg.gossip_period, cfg.t_s);
    if (cfg.nd_period) nd_steps_ = steps_for(*cfg.nd_period, cfg.t_s);
    for (const auto& [uav, depot] : sim.grid().depots()) {
      Agent a;
      a.id = uav;
      a.visited.insert(depot);
      a.schedule.alpha = cfg.alpha;
      a.schedule.beta = cfg.beta;
      a.schedule.tau_cap = cfg.tau_cap;
      agents_.emplace(uav, std::move(a));
    }
  }

  void start(Simulation& sim) override {
    divide(sim, 0);
    for (auto& [uav, a] : agents_) plan(sim, a, 0);
  }

  void tick(Simulation& sim, TimeIndex k, const std::vector<std::pair<UavId, NodeId>>& arrived) override {
    std::set<UavId> due;
    for (const auto& [uav, node] : arrived) {
      Agent& a = agents_.at(uav);
      a.visited.insert(node);
      a.goal_set.erase(node);
      due.insert(uav);
    }
    bool redivide = nd_steps_ > 0 && k % nd_steps_ == 0;
    if (k % gossip_steps_ == 0) {
      gossip();
      if (!released_.empty()) redivide = true;
    }
    if (redivide) {
      divide(sim, k);
      for (auto& [uav, a] : agents_) due.insert(uav);
    } else if (sim.config().online_replanning) {
      for (auto& [uav, a] : agents_) {
        if (sim.flying(uav) && k >= a.schedule.next_plan) due.insert(uav);
      }
    }
    for (UavId uav : due) plan(sim, agents_.at(uav), k);
  }

  bool stalled(const Simulation&) const override {
    if (!released_.empty()) return false;
    return std::all_of(agents_.begin(), agents_.end(), [](const auto& kv) { return kv.second.goal_set.empty(); });
  }

 private:
  struct Agent {
    UavId id;
    std::set<NodeId> goal_set;
    std::set<NodeId> visited;
    ReplanSchedule schedule;
  };

  void gossip() {
    std::map<UavId, std::set<NodeId>> local;
    for (const auto& [uav, a] : agents_) local[uav] = a.visited;
    for (auto& [uav, merged] : gossip_visited_lockstep(local, bus_)) agents_.at(uav).visited = std::move(merged);
  }

  void divide(Simulation& sim, TimeIndex k) {
    DivisionParams params;
    params.tour_constant = sim.config().tour_constant;
    params.wind_cap = sim.wind_cap_value();
    params.craft = sim.config().craft;
    std::vector<DivisionInput> inputs;
    for (const auto& [uav, a] : agents_) {
      std::set<NodeId> done = a.visited;
      done.insert(abandoned_.begin(), abandoned_.end());
      inputs.push_back({uav, sim.state(uav).xy(), std::move(done)});
    }
    DivisionOutcome out = run_division_lockstep(inputs, bus_, sim.grid(), params);
    std::string summary;
    for (auto& [uav, a] : agents_) {
      a.goal_set = std::move(out.goal_sets.at(uav).nodes);
      if (!summary.empty()) summary += "; ";
      summary += std::to_string(uav.value) + ":" + id_list(a.goal_set);
    }
    released_.clear();
    sim.count_division();
    sim.log(k, std::nullopt, "division", summary);
  }

  void plan(Simulation& sim, Agent& a, TimeIndex k) {
    if (a.goal_set.empty()) {
      sim.ground(a.id, k, "goal set empty");
      return;
    }
    sim.count_plan();
    const auto& cfg = sim.config();
    const WindVector d_now = sim.wind(k);
    std::map<NodeId, EnergyTriple> triples;
    std::map<NodeId, DesirablePath> paths;
    for (NodeId v : a.goal_set) {
      std::optional<DesirablePath> path;
      try {
        path = sim.plan(a.id, v, k);
      } catch (const InvalidStartError&) {
        // Drifted over an obstacle hex; keep the current reference and retry.
        a.schedule.next_plan = k + 1;
        return;
      }
      if (!path) {
        triples[v] = {EnergyJ::infeasible(), EnergyJ::infeasible(), EnergyJ::infeasible()};
        continue;
      }
      triples[v] = predict_energy_triple(*path, sim.state(a.id), d_now, sim.wind_cap_value(), cfg.gains, cfg.craft,
                                         cfg.t_s);
      paths.emplace(v, std::move(*path));
    }
    const std::optional<NodeId> goal = select_goal(a.goal_set, triples);
    if (!goal) {
      sim.log(k, a.id, "release", id_list(a.goal_set));
      for (NodeId v : a.goal_set) {
        if (++release_count_[v] >= release_limit_) {
          abandoned_.insert(v);
          sim.log(k, a.id, "abandon", std::to_string(v.value));
        } else {
          released_.insert(v);
        }
      }
      a.goal_set.clear();
      sim.ground(a.id, k, "no feasible goal");
      return;
    }
    double r_max = 0.0;
    const EnergyTriple& g = triples.at(*goal);
    for (const auto& [v, t] : triples) {
      if (v != *goal && t.predicted.feasible()) r_max = std::max(r_max, risk_number(g, t));
    }
    a.schedule.advance(k, r_max, cfg.t_s);
    sim.fly(a.id, *goal, std::move(paths.at(*goal)), k);
  }

  DivisionBus bus_;
  std::size_t release_limit_;
  TimeIndex gossip_steps_ = 1;
  TimeIndex nd_steps_ = 0;
  std::map<UavId, Agent> agents_;
  std::set<NodeId> released_;
  std::set<NodeId> abandoned_;
  std::map<NodeId, std::size_t> release_count_;
};

// ---- greedy baseline -----------------------------------------------------------

class GreedyPolicy final : public Policy {
 public:
  void start(Simulation& sim) override { assign_idle(sim, 0); }

  void tick(Simulation& sim, TimeIndex k, const std::vector<std::pair<UavId, NodeId>>& arrived) override {
    if (!arrived.empty()) assign_idle(sim, k);
  }

  bool stalled(const Simulation& sim) const override {
    for (NodeId v : sim.all_nodes()) {
      if (!sim.visited().count(v) && !claimed_.count(v) && !abandoned_.count(v)) return false;
    }
    return true;
  }

 private:
  void assign_idle(Simulation& sim, TimeIndex k) {
    for (UavId uav : sim.uavs()) {
      if (sim.flying(uav)) continue;
      const Position2D p = sim.state(uav).xy();
      std::vector<std::pair<double, NodeId>> candidates;
      for (NodeId v : sim.all_nodes()) {
        if (sim.visited().count(v) || claimed_.count(v) || abandoned_.count(v) || failed_[uav].count(v)) continue;
        candidates.emplace_back((sim.grid().node_position(v) - p).norm(), v);
      }
      std::sort(candidates.begin(), candidates.end());
      for (const auto& [dist, v] : candidates) {
        sim.count_plan();
        std::optional<DesirablePath> path = sim.plan(uav, v, k);
        if (!path) {
          failed_[uav].insert(v);
          if (++fail_count_[v] >= sim.uavs().size()) abandoned_.insert(v);
          continue;
        }
        claimed_.insert(v);
        sim.fly(uav, v, std::move(*path), k);
        break;
      }
    }
    // Claims of nodes that were just visited are no longer needed.
    for (auto it = claimed_.begin(); it != claimed_.end();) {
      it = sim.visited().count(*it) ? claimed_.erase(it) : std::next(it);
    }
  }

  std::set<NodeId> claimed_;
  std::set<NodeId> abandoned_;
  std::map<UavId, std::set<NodeId>> failed_;
  std::map<NodeId, std::size_t> fail_count_;
};

}  // namespace

MissionResult run_mission(const HexGrid& grid, const WindModel& wind, const MissionConfig& config, PolicyKind policy,
                          const TraceOptions& trace) {
  grid.validate();
  config.gains.validate();
  config.craft.validate();
  if (grid.depots().empty()) throw std::invalid_argument("scenario has no UAVs");
  Simulation sim(grid, wind, config, trace);
  std::unique_ptr<Policy> p;
  if (policy == PolicyKind::Algorithm1) {
    p = std::make_unique<Algorithm1Policy>(sim);
  } else {
    p = std::make_unique<GreedyPolicy>();
  }
  return sim.run(*p);
}

}  // namespace uavroute
