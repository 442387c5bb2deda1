#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "agplan/energy.hpp"
#include "agplan/mobility.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

/// Flight search settings. Lengths are metres; defaults_for() derives the
/// scale-relative defaults from the map's cell size.
struct FlightParams {
  double c_escape = 24.0;
  double c_landing = 120.0;
  double epsilon = 6.0;
  // Absolute altitude cap; unset means max terrain + 5 voxels.
  std::optional<double> z_ceiling;
  double near_goal_radius = 180.0;
  double voxel_size = 12.0;
  double heuristic_weight = 1.0;
  // When false the SOC rule never forces the landing stage.
  bool soc_override = true;

  static FlightParams defaults_for(double cell_size);

  /// Throws ConfigError (e.g. c_escape >= c_landing, ceiling below terrain).
  void validate(const TerrainGrid& grid) const;
  void validate() const;
};

enum class FlightStage { takeoff, escape, landing };
enum class FlightMode { direct, escape };

std::string to_string(FlightStage stage);
std::string to_string(FlightMode mode);

struct TrapEscapeState {
  double h2d0 = 0.0;  // running maximum of h2d
  double h2d = 0.0;   // horizontal Manhattan distance to goal of the node being evaluated
  FlightStage stage = FlightStage::takeoff;
  double z_dummy = 0.0;
  bool soc_override_active = false;
};

/// Stage for a given progress Delta_h2d = h2d0 - h2d:
/// takeoff on [0, c_escape), escape on [c_escape, c_landing), landing from
/// c_landing on (equality lands).
FlightStage stage_for(double delta_h2d, const FlightParams& params);

/// Trap-escape heuristic, in metres. Raises h2d0 to h2d if exceeded, picks
/// the dummy altitude for the stage (z_curr + epsilon, z_curr, z_ground),
/// forces z_ground when the flight SOC spend exceeds soc_ref, and returns
/// h2d + |z_dummy - z_curr|. Mutates `state`.
double trap_escape_heuristic(TrapEscapeState& state, double z_curr, double z_ground,
                             const FlightParams& params, double flight_soc_delta, double soc_ref);
double trap_escape_heuristic(TrapEscapeState& state, double z_curr, double z_ground,
                             const FlightParams& params, const BatteryState& battery);

FlightMode select_flight_mode(double h2d_to_goal, const FlightParams& params);

struct Voxel {
  GridIndex cell;
  int layer = 0;

  friend auto operator<=>(const Voxel&, const Voxel&) = default;
};

/// Cubic-voxel column space above the terrain. Air voxels sit at absolute
/// levels z_base + k * voxel_size; the lowest free voxel of a column (its
/// surface layer) is placed exactly on the terrain. Nodata columns and
/// columns whose surface is above the ceiling have no voxels.
class VoxelSpace {
 public:
  VoxelSpace(const TerrainGrid& grid, const FlightParams& params);

  const TerrainGrid& grid() const { return *grid_; }
  int top_layer() const { return top_; }
  double z_ceiling() const { return ceiling_; }
  int surface_layer(GridIndex cell) const { return surface_[grid_->linear(cell)]; }
  bool column_open(GridIndex cell) const;
  bool valid(const Voxel& v) const;
  Vec3 position(const Voxel& v) const;
  Voxel surface(GridIndex cell) const { return {cell, surface_layer(cell)}; }
  /// Lowest valid voxel at or above altitude z in the column.
  Voxel at_altitude(GridIndex cell, double z) const;
  std::size_t index(const Voxel& v) const;
  std::size_t size() const;

 private:
  const TerrainGrid* grid_;
  double z_base_;
  double vz_;
  double ceiling_;
  int top_;
  std::vector<int> surface_;
};

enum class FlightOutcome { landed, reached_goal, no_path, battery_limit_landing };

std::string to_string(FlightOutcome outcome);

struct FlightNode {
  Voxel voxel;
  Vec3 position;
  FlightStage stage = FlightStage::takeoff;
};

struct FlightSearchResult {
  FlightOutcome outcome = FlightOutcome::no_path;
  std::vector<FlightNode> path;
  std::optional<GridIndex> landing_point;
  double path_energy = 0.0;  // fly energy along path, no transform
  std::size_t expanded = 0;
  // Some move was skipped because the battery could not pay for it.
  bool battery_limited = false;
};

/// Trap-escape 3D A* from the surface of `start`. g is cumulative fly
/// energy, h the trap-escape heuristic times the per-metre fly energy. The
/// search ends when it expands the goal's surface voxel (reached_goal) or a
/// drivable surface voxel other than the start during the landing stage
/// (landed, or battery_limit_landing when the SOC rule forced it).
///
/// `battery` must be in flight; it is read, never debited. Nodes whose
/// projected SOC would fall below zero are pruned.
FlightSearchResult search_flight_escape(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                                        double h2d0_seed, const FlightParams& params,
                                        const MobilityLimits& limits, const EnergyParams& energy,
                                        const BatteryState& battery);

/// Plain 3D A* to the goal with the 3D Manhattan heuristic. The target is
/// the goal's surface voxel, or the voxel at `goal_z` when given.
FlightSearchResult search_flight_direct(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                                        const FlightParams& params, const EnergyParams& energy,
                                        const BatteryState& battery,
                                        std::optional<double> goal_z = std::nullopt);

/// search_flight_direct between two arbitrary voxels.
FlightSearchResult search_flight_between(const VoxelSpace& space, Voxel start, Voxel goal,
                                         const FlightParams& params, const EnergyParams& energy,
                                         const BatteryState& battery);

/// Fly segment between two positions.
Segment fly_segment(const Vec3& a, const Vec3& b);

}  // namespace agplan
