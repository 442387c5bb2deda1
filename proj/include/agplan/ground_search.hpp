#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "agplan/energy.hpp"
#include "agplan/mobility.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

enum class GroundOutcome { reached_goal, takeoff_required, exhausted };

std::string to_string(GroundOutcome outcome);

struct GroundSearchOptions {
  // Disabled for local repair searches, where only the path is wanted.
  bool detect_takeoff = true;
};

struct GroundSearchResult {
  GroundOutcome outcome = GroundOutcome::exhausted;
  // start..goal, start..switching point, or start..closest approach.
  std::vector<GridIndex> partial_path;
  std::optional<GridIndex> switching_point;
  // Minimum horizontal Manhattan distance (m) to the goal over expanded nodes.
  double h2d_min = 0.0;
  // Drive energy of partial_path (J).
  double path_energy = 0.0;
  std::size_t expanded = 0;
  TakeoffDecision decision;
  // Some move was skipped because the battery could not pay for it.
  bool battery_limited = false;
};

/// Drive segment between two cells on the surface.
Segment drive_segment(const TerrainGrid& grid, GridIndex a, GridIndex b);

/// Energy of driving `path` cell by cell, no transforms.
double drive_path_energy(const TerrainGrid& grid, const std::vector<GridIndex>& path,
                         const EnergyParams& energy);

/// Horizontal Manhattan distance between cells, in metres.
double manhattan_m(const TerrainGrid& grid, GridIndex a, GridIndex b);

/// Energy-cost A* on the 8-connected surface graph.
///
/// g is the sum of drive segment energies, h the cheapest possible drive
/// energy to the goal (standby per Chebyshev step plus per-metre motion over
/// the octile distance), scaled by limits.heuristic_weight. Cells failing
/// feasible_node are closed on sight. Each accepted move advances the
/// takeoff counter carried along its parent chain; when it fires on the move
/// n -> m the search stops and n becomes the switching point. Ties on f are
/// broken by lower h, then by (col, row).
///
/// Moves that would cost more than the battery holds are not taken.
/// Throws ContractError if start or goal is out of bounds or not drivable.
GroundSearchResult search_ground(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                                 const MobilityLimits& limits, const EnergyParams& energy,
                                 const BatteryState& battery, GroundSearchOptions options = {});

}  // namespace agplan
