#pragma once

#include <optional>

#include "agplan/terrain.hpp"

namespace agplan {

/// Ground mobility envelope: the per-cell slope intervals every drivable
/// cell must satisfy, and the maneuverability threshold (M-index) that the
/// takeoff counter compares each move's difficulty against.
struct MobilityLimits {
  double gx_min = -0.35;
  double gx_max = 0.35;
  double gy_min = -0.35;
  double gy_max = 0.35;
  double gz_min = 0.0;
  double gz_max = 0.35;
  double m_index = 0.25;
  int count_threshold = 7;
  double turn_weight = 0.4;
  double heuristic_weight = 1.0;

  void validate() const;
};

/// Unit step between 8-connected cells.
struct Heading {
  int dc = 0;
  int dr = 0;
};

/// True iff the cell is not nodata and its gradient satisfies all three
/// slope intervals.
bool feasible_node(const TerrainGrid& grid, GridIndex idx, const MobilityLimits& limits);
bool gradient_within(const TerrainGradient& g, const MobilityLimits& limits);

/// Driving difficulty of the move from -> to: the max of segment slope,
/// cross-slope at `to` relative to the travel direction, and
/// turn_weight * (1 - cos(theta)) / 2 for the heading change theta.
/// Throws ContractError when the cells are not 8-neighbours.
double dof_between(const TerrainGrid& grid, GridIndex from, GridIndex to,
                   std::optional<Heading> heading_prev, double turn_weight);

struct TakeoffDecision {
  int count = 0;
  bool flag = false;
  std::optional<GridIndex> trigger_node;
};

/// One evaluation of the takeoff decision function: a move harder than the
/// M-index extends the violation run, any other move resets it; the flag is
/// raised while the run is longer than the threshold.
TakeoffDecision takeoff_decision_step(TakeoffDecision state, double dof,
                                      const MobilityLimits& limits);

}  // namespace agplan
