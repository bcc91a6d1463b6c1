#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uavroute/mission.hpp"
#include "uavroute/scenario.hpp"

namespace uavroute {

struct ExperimentConfig {
  GeneratorConfig scenario{};
  std::optional<double> nd_period = 10.0;
  bool online_replanning = true;
  PolicyKind policy = PolicyKind::Algorithm1;
  int runs = 20;
  std::uint64_t seed = 1;
  MissionConfig mission{};  // nd_period and online_replanning above take precedence

  void validate() const;
  MissionConfig mission_config() const;
};

/// Standard flight areas, in m.
struct Area {
  double width;
  double height;
};
inline constexpr Area kSmallArea{52.0, 30.0};
inline constexpr Area kMediumArea{78.0, 45.0};
inline constexpr Area kLargeArea{104.0, 60.0};

std::uint64_t run_seed(std::uint64_t master, int run_index);

struct RunRow {
  int run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double travel_energy_J = 0.0;
  double idle_energy_J = 0.0;
  double duration_s = 0.0;
  int divisions = 0;
  std::string error;
};

struct BatchResult {
  std::vector<RunRow> rows;
  int failures = 0;
  double mean_J = 0.0;
  std::optional<double> ci95_half_width_J;  // nullopt with fewer than two successful runs
};

/// Student-t 95% half-width of the mean; nullopt for fewer than two values.
std::optional<double> ci95_half_width(const std::vector<double>& values);

RunRow run_once(const ExperimentConfig& cfg, int run_index);
BatchResult run_batch(const ExperimentConfig& cfg);

/// Greedy baseline on a ready scenario.
MissionResult run_greedy(const HexGrid& grid, const WindModel& wind, const MissionConfig& cfg);

void write_batch_csv(std::ostream& out, const BatchResult& r);
void write_batch_summary(std::ostream& out, const ExperimentConfig& cfg, const BatchResult& r);

struct ComparisonResult {
  BatchResult algorithm;
  BatchResult greedy;
  /// 1 - mean(algorithm) / mean(greedy), over runs where both succeeded.
  double savings = 0.0;
};

ComparisonResult compare(const ExperimentConfig& cfg);
void write_comparison_csv(std::ostream& out, const ComparisonResult& c);
void write_comparison_summary(std::ostream& out, const ExperimentConfig& cfg, const ComparisonResult& c);

}  // namespace uavroute
