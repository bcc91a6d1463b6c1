#include "uavroute/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "json.hpp"

namespace uavroute {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "uavroute-scenario/1";

// Uniform integer in [0, n) by rejection; unlike std::uniform_int_distribution
// the sequence is the same on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

json wind_to_json(const WindModel& w) {
  if (const auto* p = std::get_if<WindPattern>(&w)) {
    return {{"type", "pattern"},
            {"speed", p->speed},
            {"blow", p->blow_duration},
            {"cycle", p->cycle},
            {"seed", p->seed}};
  }
  json samples = json::array();
  for (const auto& s : std::get<WindTrace>(w).samples) samples.push_back({s.time_s, s.wind.x(), s.wind.y()});
  return {{"type", "trace"}, {"samples", samples}};
}

WindModel wind_from_json(const json& j, const std::filesystem::path& base) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "pattern") {
    WindPattern p;
    p.speed = j.value("speed", p.speed);
    p.blow_duration = j.value("blow", p.blow_duration);
    p.cycle = j.value("cycle", p.cycle);
    p.seed = j.value("seed", p.seed);
    return p;
  }
  if (type == "trace") {
    if (j.contains("csv")) {
      const std::filesystem::path file = base / j.at("csv").get<std::string>();
      std::ifstream in(file);
      if (!in) throw ScenarioFormatError("cannot open wind trace " + file.string());
      return read_wind_trace_csv(in);
    }
    WindTrace t;
    for (const auto& row : j.at("samples")) {
      t.samples.push_back({row.at(0).get<double>(), WindVector(row.at(1).get<double>(), row.at(2).get<double>())});
    }
    return t;
  }
  throw ScenarioFormatError("unknown wind type '" + type + "'");
}

Scenario from_json(const json& j, const std::filesystem::path& base) {
  if (j.value("format", std::string()) != kFormat) {
    throw ScenarioFormatError(std::string("expected format \"") + kFormat + "\"");
  }
  Scenario s;
  s.name = j.value("name", s.name);
  const json& area = j.at("area");
  s.width_m = area.at("width").get<double>();
  s.height_m = area.at("height").get<double>();
  s.side_m = area.value("side", 1.0);
  for (const auto& o : j.value("obstacles", json::array())) s.obstacles.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
  for (const auto& n : j.at("nodes")) {
    s.nodes.push_back({NodeId{n.at("id").get<std::int32_t>()}, {n.at("q").get<int>(), n.at("r").get<int>()}});
  }
  for (const auto& u : j.at("uavs")) {
    s.uavs.push_back({UavId{u.at("id").get<std::int32_t>()}, NodeId{u.at("depot").get<std::int32_t>()}});
  }
  if (j.contains("wind")) s.wind = wind_from_json(j.at("wind"), base);
  return s;
}

}  // namespace

HexGrid Scenario::build_grid() const {
  HexGrid grid(width_m, height_m, side_m);
  for (HexCoord h : obstacles) grid.add_obstacle(h);
  for (const auto& n : nodes) grid.add_node(n.id, n.hex);
  for (const auto& u : uavs) grid.assign_depot(u.id, u.depot);
  grid.validate();
  return grid;
}

Scenario read_scenario_json(std::istream& in) {
  try {
    return from_json(json::parse(in), std::filesystem::current_path());
  } catch (const json::exception& e) {
    throw ScenarioFormatError(std::string("scenario JSON: ") + e.what());
  }
}

void write_scenario_json(std::ostream& out, const Scenario& s) {
  json j;
  j["format"] = kFormat;
  j["name"] = s.name;
  j["area"] = {{"width", s.width_m}, {"height", s.height_m}, {"side", s.side_m}};
  json obstacles = json::array();
  for (HexCoord h : s.obstacles) obstacles.push_back({h.q, h.r});
  j["obstacles"] = obstacles;
  json nodes = json::array();
  for (const auto& n : s.nodes) nodes.push_back({{"id", n.id.value}, {"q", n.hex.q}, {"r", n.hex.r}});
  j["nodes"] = nodes;
  json uavs = json::array();
  for (const auto& u : s.uavs) uavs.push_back({{"id", u.id.value}, {"depot", u.depot.value}});
  j["uavs"] = uavs;
  j["wind"] = wind_to_json(s.wind);
  out << j.dump(2) << '\n';
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFormatError("cannot open scenario " + path);
  try {
    return from_json(json::parse(in), std::filesystem::path(path).parent_path());
  } catch (const json::exception& e) {
    throw ScenarioFormatError(path + ": " + e.what());
  }
}

void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw ScenarioFormatError("cannot write scenario " + path);
  write_scenario_json(out, s);
}

Scenario generate_scenario(const GeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n_nodes < 0 || cfg.n_uavs < 1) throw std::invalid_argument("need n_nodes >= 0 and n_uavs >= 1");
  if (!(cfg.obstacle_fraction >= 0.0 && cfg.obstacle_fraction < 1.0)) {
    throw std::invalid_argument("obstacle_fraction must be in [0, 1)");
  }
  const HexGrid probe(cfg.width_m, cfg.height_m, cfg.side_m);
  std::vector<HexCoord> hexes = probe.all_hexes();
  const auto n_obstacles = static_cast<std::size_t>(cfg.obstacle_fraction * static_cast<double>(hexes.size()));
  const std::size_t needed = n_obstacles + static_cast<std::size_t>(cfg.n_nodes + cfg.n_uavs);
  if (needed > hexes.size()) {
    throw CapacityError(std::to_string(cfg.n_nodes + cfg.n_uavs) + " nodes and depots do not fit on " +
                        std::to_string(hexes.size() - n_obstacles) + " free hexes");
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < needed; ++i) {
    std::swap(hexes[i], hexes[i + bounded(rng, hexes.size() - i)]);
  }

  Scenario s;
  s.name = "generated-" + std::to_string(seed);
  s.width_m = cfg.width_m;
  s.height_m = cfg.height_m;
  s.side_m = cfg.side_m;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n_obstacles; ++i) s.obstacles.push_back(hexes[next++]);
  for (int i = 1; i <= cfg.n_nodes; ++i) s.nodes.push_back({NodeId{i}, hexes[next++]});
  for (int i = 1; i <= cfg.n_uavs; ++i) {
    const NodeId depot{cfg.n_nodes + i};
    s.nodes.push_back({depot, hexes[next++]});
    s.uavs.push_back({UavId{i}, depot});
  }
  WindPattern wind;
  wind.speed = cfg.wind_speed;
  wind.seed = splitmix64(seed ^ 0x57494E44ULL);
  s.wind = wind;
  return s;
}

}  // namespace uavroute
