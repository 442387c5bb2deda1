#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agplan/config.hpp"
#include "agplan/planner.hpp"
#include "agplan/switch_opt.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

/// A planning task: terrain (synthetic or a DEM file), endpoints and config
/// overrides. An overlay terrain, when present, is added cell by cell.
struct Scenario {
  std::string name;
  std::optional<SynthSpec> synth;
  std::optional<SynthSpec> overlay;
  std::optional<std::string> dem_path;
  GridIndex start;
  GridIndex goal;
  ConfigMap overrides;
};

TerrainGrid scenario_terrain(const Scenario& scenario);
PlannerConfig scenario_config(const Scenario& scenario, const TerrainGrid& grid);

/// flat, ridge, sloped-ridge, ring, low, high, composite.
const std::vector<Scenario>& bundled_scenarios();
/// Throws ConfigError for unknown names.
const Scenario& bundled_scenario(const std::string& name);

/// Scenario files: `key = value` lines with name, start = col,row,
/// goal = col,row, either dem = <path> or synth.<field> = value, optional
/// overlay.<field> = value, and config keys prefixed with `config.`.
/// Relative DEM paths are resolved against `base_dir`.
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir = "",
                             const std::string& source = "<scenario>");
Scenario load_scenario_file(const std::string& path);
std::string scenario_text(const Scenario& scenario);

struct SwitchSummary {
  SwitchDirection direction = SwitchDirection::ground_to_air;
  GridIndex initial_cell;
  GridIndex optimized_cell;
  double initial_f = 0.0;
  double optimized_f = 0.0;

  friend bool operator==(const SwitchSummary&, const SwitchSummary&) = default;
};

struct PlanOutcome {
  bool ok = false;
  std::string error;
  double energy = 0.0;
  std::size_t switches = 0;
  std::vector<double> soc;
  std::vector<SwitchSummary> switch_points;

  friend bool operator==(const PlanOutcome&, const PlanOutcome&) = default;
};

struct ScenarioRun {
  std::string scenario;
  PlanOutcome optimized;
  PlanOutcome unoptimized;
  // 1 - optimized / unoptimized; unset unless both plans succeeded.
  std::optional<double> savings;

  friend bool operator==(const ScenarioRun&, const ScenarioRun&) = default;
};

/// Plans the scenario with switch optimisation on and off. Planner failures
/// are recorded, not thrown.
ScenarioRun run_scenario(const Scenario& scenario);

/// Scenarios run in parallel; results keep input order.
std::vector<ScenarioRun> run_scenarios(const std::vector<Scenario>& scenarios);
std::vector<ScenarioRun> run_scenarios_serial(const std::vector<Scenario>& scenarios);

struct MethodResult {
  std::string method;
  std::size_t evaluations = 0;  // counted by the wrapper
  double best_f = 0.0;
  double best_r = 0.0;
  double best_e = 0.0;
  GridIndex point;
  bool path_ok = false;
  std::string path_error;
  double path_energy = 0.0;

  friend bool operator==(const MethodResult&, const MethodResult&) = default;
};

struct MethodComparison {
  std::string scenario;
  std::size_t budget_requested = 0;
  std::size_t budget = 0;  // per method, after normalisation
  std::size_t bas_iterations = 0;
  std::uint64_t seed = 0;
  GridIndex initial_point;
  double initial_f = 0.0;
  std::vector<MethodResult> methods;  // bas, exhaustive-grid, random-search, particle-swarm

  friend bool operator==(const MethodComparison&, const MethodComparison&) = default;
};

struct MethodTiming {
  std::string scenario;
  std::string method;
  double wall_ms = 0.0;
};

/// Smallest 3k + 1 >= budget. Throws ContractError below 3.
std::size_t normalized_budget(std::size_t budget);

/// BAS and the three baselines on the scenario's first takeoff problem with
/// equal evaluation budgets, then a full plan per method with that method
/// choosing every switching point. Throws NoPathError when the scenario has
/// no takeoff. Wall times, if wanted, go to `timings`.
MethodComparison run_method_comparison(const Scenario& scenario, std::size_t budget,
                                       std::uint64_t seed,
                                       std::vector<MethodTiming>* timings = nullptr);

/// Optimiser used by the comparison for `method` ("bas" or a baseline name)
/// spending `budget` evaluations per switch (a normalised budget). BAS takes
/// its geometry from `bas`; every method seeds with seed + switch number.
SwitchOptimizer comparison_optimizer(const std::string& method, std::size_t budget,
                                     std::uint64_t seed, const BasParams& bas);

/// Method names in report order.
const std::vector<std::string>& comparison_methods();

/// Unimodal test landscape on a flat 33 x 33 grid: F = 1000 + 100 d^2 with d
/// the distance in cells from the cell one column right of the centre.
struct BowlScenario {
  TerrainGrid grid;
  std::vector<std::uint8_t> drivable;
  GridIndex initial;
  GridIndex optimum;
  double radius = 0.0;
};

BowlScenario bowl_scenario();
FitnessFn bowl_fitness(const BowlScenario& bowl);

struct ComparisonReport {
  int schema_version = 1;
  std::vector<ScenarioRun> scenarios;
  std::vector<MethodComparison> comparisons;

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

enum class ReportFormat { json, csv };

class ReportParseError : public Error {
 public:
  using Error::Error;
};

ReportFormat parse_report_format(const std::string& name);

/// JSON document, or long CSV with columns record,scenario,method,field,index,value.
std::string emit_report(const ComparisonReport& report, ReportFormat format);
ComparisonReport parse_report(const std::string& text, ReportFormat format);

std::string timings_csv(const std::vector<MethodTiming>& timings);

}  // namespace agplan
