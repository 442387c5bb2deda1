#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agplan/energy.hpp"
#include "agplan/flight_search.hpp"
#include "agplan/geometry.hpp"
#include "agplan/mobility.hpp"
#include "agplan/switch_opt.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

struct PlannerConfig {
  EnergyParams energy;
  BatterySettings battery;
  MobilityLimits limits;
  FlightParams flight;
  BasParams bas;
  bool optimize = true;
  int max_switches = 20;
  int smoothing_samples = 200;

  static PlannerConfig defaults_for(double cell_size);
  void validate() const;
  void validate(const TerrainGrid& grid) const;
};

struct PathNode {
  Vec3 position;
  Mode mode = Mode::drive;  // mode of the segment arriving at this node
  double cumulative_energy = 0.0;
  double soc = 1.0;
  // The segment leaving a switch point is charged one transform.
  bool is_switch_point = false;
};

enum class SwitchDirection { ground_to_air, air_to_ground };

std::string to_string(SwitchDirection direction);

struct SwitchRecord {
  std::size_t index = 0;  // node index
  SwitchDirection direction = SwitchDirection::ground_to_air;
  GridIndex initial_cell;
  GridIndex optimized_cell;
  Vec3 initial_point;
  Vec3 optimized_point;
  SwitchFitness initial_fitness;
  SwitchFitness optimized_fitness;
  std::size_t evaluations = 0;
  std::vector<BasTraceEntry> trace;
};

struct ModeLeg {
  Mode mode = Mode::drive;
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive; shared with the next leg's first
};

struct FlightLog {
  FlightMode mode = FlightMode::escape;
  FlightOutcome outcome = FlightOutcome::no_path;
  // Stage of each node of the search's own path.
  std::vector<FlightStage> stages;
  // Node index after which a landing repair replaced the searched tail.
  std::optional<std::size_t> repaired_from;
};

struct PlannedPath {
  std::vector<PathNode> nodes;
  std::vector<SwitchRecord> switch_points;
  std::vector<ModeLeg> legs;
  std::vector<FlightLog> flights;
  double total_energy = 0.0;
  double total_distance = 0.0;
  double initial_soc = 1.0;
  bool reached_goal = false;
};

/// Failures carry whatever was planned before the failure.
class PlanError : public Error {
 public:
  PlanError(const std::string& what, PlannedPath partial)
      : Error(what), partial_(std::make_shared<PlannedPath>(std::move(partial))) {}
  const PlannedPath& partial() const { return *partial_; }

 private:
  std::shared_ptr<const PlannedPath> partial_;
};

class NoPathError : public PlanError {
 public:
  using PlanError::PlanError;
};

class PlanBatteryError : public PlanError {
 public:
  using PlanError::PlanError;
};

class SwitchCapError : public PlanError {
 public:
  using PlanError::PlanError;
};

class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Chooses a switching point inside `domain`; the argument after the fitness
/// is the zero-based switch number, for per-switch seeding.
using SwitchOptimizer =
    std::function<SwitchResult(const SwitchDomain&, const FitnessFn&, std::size_t)>;

/// BAS with seed bas.seed + switch number.
SwitchOptimizer bas_optimizer(const BasParams& params);

/// Takeoff fitness context for a ground path ending at the switching point:
/// the path node ceil(radius / cell) steps back, and a point radius + one
/// cell ahead towards the goal, one voxel above the highest terrain under
/// that line.
SwitchContext takeoff_context(const TerrainGrid& grid, const std::vector<GridIndex>& ground_path,
                              GridIndex goal, const PlannerConfig& cfg);

FitnessWeights switch_weights(const BasParams& bas, double soc);

/// Alternates ground and flight searches from start to goal.
///
/// A ground search runs until it reaches the goal or raises the takeoff
/// flag. At a takeoff the switching point is optimised (unless disabled),
/// the ground path is repaired to the new point, and a flight search starts
/// there: direct to the goal when it is within the near-goal radius,
/// trap-escape otherwise. A landing point is optimised the same way, the
/// flight tail repaired, and the ground search resumes from it. The battery
/// is debited node by node.
///
/// Throws NoPathError, PlanBatteryError or SwitchCapError with the partial
/// path; ContractError if start or goal is not a drivable cell.
PlannedPath plan(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                 const PlannerConfig& config, const SwitchOptimizer& optimizer = {});

struct SmoothedLeg {
  Mode mode = Mode::drive;
  // Cubic pieces, four control points each.
  std::vector<Vec3> control_points;
  std::vector<Vec3> samples;
};

struct SmoothedPath {
  std::vector<SmoothedLeg> legs;
  std::vector<Vec3> samples;  // all legs, shared switch samples kept once
  double max_deviation = 0.0;
};

/// Corner-cutting cubic Bezier fit per leg: straight halves at both ends and
/// one curve per interior corner from edge midpoint to edge midpoint. Leg
/// ends, and so every switch point, are interpolated exactly.
SmoothedPath smooth(const PlannedPath& path, int samples_per_leg);

/// Sample of the cubic Bezier with controls c[0..3] at u in [0, 1].
Vec3 bezier_point(const Vec3* c, double u);

/// Distance from p to the polyline.
double polyline_distance(const Vec3& p, const std::vector<Vec3>& polyline);

struct LegAccount {
  Mode mode = Mode::drive;
  double joules = 0.0;
  double meters = 0.0;
};

struct EnergyAccount {
  std::vector<LegAccount> per_leg;
  double total_energy = 0.0;
  double total_distance = 0.0;
  int transforms = 0;
  std::vector<double> cumulative;  // per node
  std::vector<double> soc_trace;   // per node
};

/// Recomputes every segment from node positions and modes and checks the
/// result against the path's recorded cumulative energies and totals.
/// Throws InternalConsistencyError past 1e-9 relative.
EnergyAccount account(const PlannedPath& path, const EnergyParams& energy,
                      const BatterySettings& battery);

/// Same recomputation without the check, for paths read back from files.
EnergyAccount recompute_account(const PlannedPath& path, const EnergyParams& energy,
                                const BatterySettings& battery);

}  // namespace agplan
