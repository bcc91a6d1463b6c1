#include "uavroute/harness.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace uavroute {

void ExperimentConfig::validate() const {
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (!(scenario.width_m > 0.0 && scenario.height_m > 0.0)) throw std::invalid_argument("area must be positive");
  if (nd_period && !(*nd_period > 0.0)) throw std::invalid_argument("nd period must be positive");
}

MissionConfig ExperimentConfig::mission_config() const {
  MissionConfig m = mission;
  m.nd_period = nd_period;
  m.online_replanning = online_replanning;
  return m;
}

std::uint64_t run_seed(std::uint64_t master, int run_index) {
  return splitmix64(master + static_cast<std::uint64_t>(run_index));
}

std::optional<double> ci95_half_width(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return std::nullopt;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(static_cast<double>(n));
}

MissionResult run_greedy(const HexGrid& grid, const WindModel& wind, const MissionConfig& cfg) {
  return run_mission(grid, wind, cfg, PolicyKind::Greedy);
}

RunRow run_once(const ExperimentConfig& cfg, int run_index) {
  RunRow row;
  row.run = run_index;
  row.seed = run_seed(cfg.seed, run_index);
  try {
    const Scenario s = generate_scenario(cfg.scenario, row.seed);
    const HexGrid grid = s.build_grid();
    const MissionResult r = run_mission(grid, s.wind, cfg.mission_config(), cfg.policy);
    row.travel_energy_J = r.total_travel_energy_J;
    row.idle_energy_J = r.total_idle_energy_J;
    row.duration_s = static_cast<double>(r.T) * cfg.mission.t_s;
    row.divisions = r.divisions;
    row.ok = r.ok();
    if (r.timed_out) {
      row.error = "timed out";
    } else if (!r.violations.empty()) {
      row.error = r.violations.front();
    }
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

namespace {

void summarize(BatchResult& b) {
  std::vector<double> ok;
  for (const auto& r : b.rows) {
    if (r.ok) {
      ok.push_back(r.travel_energy_J);
    } else {
      ++b.failures;
    }
  }
  b.mean_J = ok.empty() ? 0.0 : std::accumulate(ok.begin(), ok.end(), 0.0) / static_cast<double>(ok.size());
  b.ci95_half_width_J = ci95_half_width(ok);
}

// CSV fields must not contain separators.
std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string describe(const ExperimentConfig& cfg) {
  std::string s = std::string(to_string(cfg.policy)) + ", " + fixed(cfg.scenario.width_m, 0) + "x" +
                  fixed(cfg.scenario.height_m, 0) + " m, " + std::to_string(cfg.scenario.n_nodes) + " nodes, " +
                  std::to_string(cfg.scenario.n_uavs) + " UAVs, wind " + fixed(cfg.scenario.wind_speed, 1) +
                  " m/s, ND " + (cfg.nd_period ? fixed(*cfg.nd_period, 0) + " s" : std::string("off")) + ", OP " +
                  (cfg.online_replanning ? "on" : "off") + ", " + std::to_string(cfg.runs) + " runs, seed " +
                  std::to_string(cfg.seed);
  return s;
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& cfg) {
  cfg.validate();
  BatchResult b;
  for (int i = 0; i < cfg.runs; ++i) b.rows.push_back(run_once(cfg, i));
  summarize(b);
  return b;
}

void write_batch_csv(std::ostream& out, const BatchResult& r) {
  out << "run,seed,ok,travel_energy_J,idle_energy_J,duration_s,divisions,error\n";
  for (const auto& row : r.rows) {
    out << row.run << ',' << row.seed << ',' << (row.ok ? 1 : 0) << ',' << fixed(row.travel_energy_J) << ','
        << fixed(row.idle_energy_J) << ',' << fixed(row.duration_s) << ',' << row.divisions << ','
        << sanitize(row.error) << '\n';
  }
}

void write_batch_summary(std::ostream& out, const ExperimentConfig& cfg, const BatchResult& r) {
  out << "config:   " << describe(cfg) << '\n';
  out << "runs ok:  " << (r.rows.size() - static_cast<std::size_t>(r.failures)) << " of " << r.rows.size()
      << " (failures: " << r.failures << ")\n";
  out << "mean:     " << fixed(r.mean_J, 1) << " J\n";
  out << "95% CI:   "
      << (r.ci95_half_width_J ? "+/- " + fixed(*r.ci95_half_width_J, 1) + " J" : std::string("n/a")) << '\n';
}

ComparisonResult compare(const ExperimentConfig& cfg) {
  ComparisonResult c;
  ExperimentConfig a = cfg;
  a.policy = PolicyKind::Algorithm1;
  ExperimentConfig g = cfg;
  g.policy = PolicyKind::Greedy;
  c.algorithm = run_batch(a);
  c.greedy = run_batch(g);
  double sa = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < c.algorithm.rows.size(); ++i) {
    if (c.algorithm.rows[i].ok && c.greedy.rows[i].ok) {
      sa += c.algorithm.rows[i].travel_energy_J;
      sg += c.greedy.rows[i].travel_energy_J;
    }
  }
  c.savings = sg > 0.0 ? 1.0 - sa / sg : 0.0;
  return c;
}

void write_comparison_csv(std::ostream& out, const ComparisonResult& c) {
  out << "run,seed,algorithm_ok,algorithm_J,greedy_ok,greedy_J,savings\n";
  for (std::size_t i = 0; i < c.algorithm.rows.size(); ++i) {
    const RunRow& a = c.algorithm.rows[i];
    const RunRow& g = c.greedy.rows[i];
    out << a.run << ',' << a.seed << ',' << (a.ok ? 1 : 0) << ',' << fixed(a.travel_energy_J) << ','
        << (g.ok ? 1 : 0) << ',' << fixed(g.travel_energy_J) << ',';
    if (a.ok && g.ok && g.travel_energy_J > 0.0) out << fixed(1.0 - a.travel_energy_J / g.travel_energy_J, 4);
    out << '\n';
  }
}

void write_comparison_summary(std::ostream& out, const ExperimentConfig& cfg, const ComparisonResult& c) {
  ExperimentConfig a = cfg;
  a.policy = PolicyKind::Algorithm1;
  ExperimentConfig g = cfg;
  g.policy = PolicyKind::Greedy;
  write_batch_summary(out, a, c.algorithm);
  write_batch_summary(out, g, c.greedy);
  out << "savings:  " << fixed(100.0 * c.savings, 1) << " % of greedy energy\n";
}

}  // namespace uavroute
