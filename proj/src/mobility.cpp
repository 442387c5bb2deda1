#include "agplan/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace agplan {

void MobilityLimits::validate() const {
  if (!(gx_min < gx_max) || !(gy_min < gy_max) || !(gz_min < gz_max)) {
    throw ConfigError("ground slope bounds need min < max on every axis");
  }
  if (!(m_index > 0.0)) throw ConfigError("ground.m_index must be positive");
  if (count_threshold < 1) throw ConfigError("ground.thre must be >= 1");
  if (!(turn_weight >= 0.0)) throw ConfigError("ground.turn_weight must be >= 0");
  if (!(heuristic_weight >= 0.0)) throw ConfigError("ground.heuristic_weight must be >= 0");
}

bool gradient_within(const TerrainGradient& g, const MobilityLimits& l) {
  return g.gx >= l.gx_min && g.gx <= l.gx_max && g.gy >= l.gy_min && g.gy <= l.gy_max &&
         g.gz >= l.gz_min && g.gz <= l.gz_max;
}

bool feasible_node(const TerrainGrid& grid, GridIndex idx, const MobilityLimits& limits) {
  if (!grid.in_bounds(idx)) throw BoundsError("feasible_node: index out of bounds");
  try {
    return gradient_within(grid.gradient_at(idx), limits);
  } catch (const NodataError&) {
    return false;
  }
}

double dof_between(const TerrainGrid& grid, GridIndex from, GridIndex to,
                   std::optional<Heading> heading_prev, double turn_weight) {
  const int dc = to.col - from.col;
  const int dr = to.row - from.row;
  if (std::abs(dc) > 1 || std::abs(dr) > 1 || (dc == 0 && dr == 0)) {
    throw ContractError("dof_between requires 8-adjacent cells");
  }
  const double h = grid.cell_size();
  const double run = (dc != 0 && dr != 0) ? h * std::sqrt(2.0) : h;
  const double slope = std::abs(grid.elevation_at(to) - grid.elevation_at(from)) / run;

  const TerrainGradient g = grid.gradient_at(to);
  const double len = std::hypot(dc, dr);
  // Component of the surface gradient perpendicular to travel.
  const double cross = std::abs(-g.gx * dr + g.gy * dc) / len;

  double turn = 0.0;
  if (heading_prev && (heading_prev->dc != 0 || heading_prev->dr != 0)) {
    const double dotp = heading_prev->dc * dc + heading_prev->dr * dr;
    const double cos_theta = dotp / (len * std::hypot(heading_prev->dc, heading_prev->dr));
    turn = turn_weight * (1.0 - std::clamp(cos_theta, -1.0, 1.0)) / 2.0;
  }
  return std::max({slope, cross, turn});
}

TakeoffDecision takeoff_decision_step(TakeoffDecision state, double dof,
                                      const MobilityLimits& limits) {
  if (dof > limits.m_index) {
    ++state.count;
  } else {
    state.count = 0;
  }
  state.flag = state.count > limits.count_threshold;
  return state;
}

}  // namespace agplan
