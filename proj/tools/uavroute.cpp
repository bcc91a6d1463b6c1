// Command-line front end: simulate, batch, compare, scenario gen.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "uavroute/harness.hpp"
#include "uavroute/mission.hpp"
#include "uavroute/scenario.hpp"

using namespace uavroute;

namespace {

constexpr int kExitInvariant = 2;

struct CommonFlags {
  std::string area = "52x30";
  int nodes = 30;
  int uavs = 4;
  double wind = 2.0;
  std::string nd = "10";
  std::string op = "on";
  std::string policy = "algorithm1";
  int runs = 20;
  std::uint64_t seed = 1;
  std::string out;
};

void add_experiment_flags(CLI::App* app, CommonFlags& f, bool with_runs) {
  app->add_option("--area", f.area, "Flight area WIDTHxHEIGHT in m (52x30, 78x45, 104x60, ...)")->capture_default_str();
  app->add_option("--nodes", f.nodes, "Number of nodes to visit")->capture_default_str()->check(CLI::Range(0, 100000));
  app->add_option("--uavs", f.uavs, "Number of UAVs")->capture_default_str()->check(CLI::Range(1, 1000));
  app->add_option("--wind", f.wind, "Wind speed in m/s (2 = low, 8 = high)")->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  if (with_runs) {
    app->add_option("--nd", f.nd, "Node division period in s, or 'off' for one division at start")->capture_default_str();
    app->add_option("--op", f.op, "Online replanning: on|off")->capture_default_str()->check(CLI::IsMember({"on", "off"}));
    app->add_option("--runs", f.runs, "Number of random scenarios")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--out", f.out, "Write the CSV here instead of stdout");
  }
}

GeneratorConfig generator_config(const CommonFlags& f) {
  GeneratorConfig g;
  const auto x = f.area.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--area", "expected WIDTHxHEIGHT");
  g.width_m = std::stod(f.area.substr(0, x));
  g.height_m = std::stod(f.area.substr(x + 1));
  g.n_nodes = f.nodes;
  g.n_uavs = f.uavs;
  g.wind_speed = f.wind;
  return g;
}

std::optional<double> parse_nd(const std::string& nd) {
  if (nd == "off") return std::nullopt;
  return std::stod(nd);
}

PolicyKind parse_policy(const std::string& p) {
  if (p == "algorithm1") return PolicyKind::Algorithm1;
  if (p == "greedy") return PolicyKind::Greedy;
  throw CLI::ValidationError("--policy", "expected algorithm1 or greedy");
}

ExperimentConfig experiment_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  cfg.scenario = generator_config(f);
  cfg.nd_period = parse_nd(f.nd);
  cfg.online_replanning = f.op == "on";
  cfg.policy = parse_policy(f.policy);
  cfg.runs = f.runs;
  cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

// CSV goes to --out or stdout; the summary goes to stdout, or stderr when
// stdout carries the CSV.
struct Outputs {
  std::ofstream file;
  std::ostream* csv = &std::cout;
  std::ostream* summary = &std::cout;

  explicit Outputs(const std::string& path) {
    if (path.empty()) {
      summary = &std::cerr;
      return;
    }
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    csv = &file;
  }
};

int cmd_simulate(const std::string& scenario_path, const CommonFlags& f, const std::string& trace_path,
                 const std::string& events_path, int stride) {
  const Scenario s = load_scenario(scenario_path);
  const HexGrid grid = s.build_grid();
  MissionConfig cfg;
  cfg.nd_period = parse_nd(f.nd);
  cfg.online_replanning = f.op == "on";

  std::ofstream trace_file;
  TraceOptions trace;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) throw std::runtime_error("cannot write " + trace_path);
    trace.csv = &trace_file;
    trace.stride = stride;
  }
  const PolicyKind policy = parse_policy(f.policy);
  const MissionResult r = run_mission(grid, s.wind, cfg, policy, trace);

  if (!events_path.empty()) {
    std::ofstream ev(events_path);
    if (!ev) throw std::runtime_error("cannot write " + events_path);
    write_event_log(ev, r.events);
  }

  std::printf("scenario:       %s (%zu nodes incl. depots, %zu UAVs)\n", s.name.c_str(), s.nodes.size(),
              s.uavs.size());
  std::printf("policy:         %s, ND %s, OP %s\n", to_string(policy), f.nd.c_str(), f.op.c_str());
  std::printf("duration:       %.3f s\n", static_cast<double>(r.T) * cfg.t_s);
  std::printf("travel energy:  %.3f J\n", r.total_travel_energy_J);
  for (const auto& [uav, e] : r.travel_energy_J) {
    std::printf("  uav %-3d       %.3f J (idle hover %.3f J)\n", uav.value, e, r.idle_energy_J.at(uav));
  }
  std::printf("divisions:      %d\nplanning passes: %d\n", r.divisions, r.planning_passes);
  if (r.timed_out) std::printf("TIMED OUT\n");
  for (const auto& v : r.violations) std::printf("INVARIANT VIOLATION: %s\n", v.c_str());
  return r.ok() ? 0 : kExitInvariant;
}

int cmd_batch(const CommonFlags& f) {
  const ExperimentConfig cfg = experiment_config(f);
  const BatchResult r = run_batch(cfg);
  Outputs out(f.out);
  write_batch_csv(*out.csv, r);
  write_batch_summary(*out.summary, cfg, r);
  return r.failures == 0 ? 0 : kExitInvariant;
}

int cmd_compare(const CommonFlags& f) {
  const ExperimentConfig cfg = experiment_config(f);
  const ComparisonResult c = compare(cfg);
  Outputs out(f.out);
  write_comparison_csv(*out.csv, c);
  write_comparison_summary(*out.summary, cfg, c);
  return c.algorithm.failures + c.greedy.failures == 0 ? 0 : kExitInvariant;
}

int cmd_scenario_gen(const CommonFlags& f, double obstacles, const std::string& out_path) {
  GeneratorConfig g = generator_config(f);
  g.obstacle_fraction = obstacles;
  const Scenario s = generate_scenario(g, f.seed);
  if (out_path.empty()) {
    write_scenario_json(std::cout, s);
  } else {
    save_scenario(out_path, s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware multi-UAV routing simulator"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  std::string scenario_path, trace_path, events_path;
  int stride = 20;
  auto* sim = app.add_subcommand("simulate", "Run one scenario and report the plan and its energy");
  sim->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sim->add_option("--policy", sim_flags.policy, "algorithm1|greedy")->capture_default_str();
  sim->add_option("--nd", sim_flags.nd, "Node division period in s, or 'off'")->capture_default_str();
  sim->add_option("--op", sim_flags.op, "Online replanning: on|off")->capture_default_str()->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--trace", trace_path, "Per-tick trace CSV output");
  sim->add_option("--trace-stride", stride, "Ticks between trace rows")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--events", events_path, "Event log CSV output");

  CommonFlags batch_flags;
  auto* batch = app.add_subcommand("batch", "Run one policy over many random scenarios");
  add_experiment_flags(batch, batch_flags, true);
  batch->add_option("--policy", batch_flags.policy, "algorithm1|greedy")->capture_default_str();

  CommonFlags cmp_flags;
  auto* cmp = app.add_subcommand("compare", "Algorithm 1 against the greedy baseline on the same scenarios");
  add_experiment_flags(cmp, cmp_flags, true);

  CommonFlags gen_flags;
  double obstacles = 0.0;
  std::string gen_out;
  auto* scen = app.add_subcommand("scenario", "Scenario utilities");
  scen->require_subcommand(1);
  auto* gen = scen->add_subcommand("gen", "Generate a random scenario");
  add_experiment_flags(gen, gen_flags, false);
  gen->add_option("--obstacles", obstacles, "Fraction of hexes made obstacles")->capture_default_str()->check(CLI::Range(0.0, 0.9));
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(scenario_path, sim_flags, trace_path, events_path, stride);
    if (*batch) return cmd_batch(batch_flags);
    if (*cmp) return cmd_compare(cmp_flags);
    if (*gen) return cmd_scenario_gen(gen_flags, obstacles, gen_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
