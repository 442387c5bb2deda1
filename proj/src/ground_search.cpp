#include "agplan/ground_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

#include "agplan/kernels.hpp"

namespace agplan {

std::string to_string(GroundOutcome outcome) {
  switch (outcome) {
    case GroundOutcome::reached_goal: return "reached-goal";
    case GroundOutcome::takeoff_required: return "takeoff-required";
    case GroundOutcome::exhausted: return "exhausted";
  }
  return "exhausted";
}

Segment drive_segment(const TerrainGrid& grid, GridIndex a, GridIndex b) {
  const Vec3 pa = grid.surface_point(a);
  const Vec3 pb = grid.surface_point(b);
  return {distance(pa, pb), pb.z - pa.z, Mode::drive};
}

double drive_path_energy(const TerrainGrid& grid, const std::vector<GridIndex>& path,
                         const EnergyParams& energy) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += segment_energy(energy, drive_segment(grid, path[i - 1], path[i]), false);
  }
  return total;
}

double manhattan_m(const TerrainGrid& grid, GridIndex a, GridIndex b) {
  return (std::abs(a.col - b.col) + std::abs(a.row - b.row)) * grid.cell_size();
}

namespace {

struct OpenEntry {
  double f;
  double h;
  int col;
  int row;
  double g;
};

struct OpenOrder {
  // priority_queue pops the largest element, so "greater" means worse.
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    return std::tie(a.f, a.h, a.col, a.row) > std::tie(b.f, b.h, b.col, b.row);
  }
};

}  // namespace

GroundSearchResult search_ground(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                                 const MobilityLimits& limits, const EnergyParams& energy,
                                 const BatteryState& battery, GroundSearchOptions options) {
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw ContractError("ground search start/goal out of bounds");
  }
  const std::vector<std::uint8_t> mask = feasibility_mask(grid, limits);
  if (!mask[grid.linear(start)]) throw ContractError("ground search start cell is not drivable");
  if (!mask[grid.linear(goal)]) throw ContractError("ground search goal cell is not drivable");

  const double cs = grid.cell_size();
  const double per_step = energy.standby_energy;
  const double per_meter = drive_energy_per_meter(energy);
  const auto heuristic = [&](GridIndex n) {
    const int dx = std::abs(n.col - goal.col);
    const int dy = std::abs(n.row - goal.row);
    const int cheb = std::max(dx, dy);
    const double octile = (std::max(dx, dy) - std::min(dx, dy)) + std::sqrt(2.0) * std::min(dx, dy);
    return limits.heuristic_weight * (per_step * cheb + per_meter * octile * cs);
  };

  const std::size_t n_cells = grid.cell_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(n_cells, kInf);
  std::vector<std::int64_t> parent(n_cells, -1);
  std::vector<std::uint8_t> closed(n_cells, 0);
  std::vector<TakeoffDecision> decision(n_cells);
  std::vector<Heading> heading(n_cells);

  GroundSearchResult result;
  result.h2d_min = manhattan_m(grid, start, goal);

  const auto reconstruct = [&](GridIndex end) {
    std::vector<GridIndex> path;
    for (std::int64_t i = static_cast<std::int64_t>(grid.linear(end)); i >= 0;
         i = parent[static_cast<std::size_t>(i)]) {
      path.push_back(grid.unlinear(static_cast<std::size_t>(i)));
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  g[grid.linear(start)] = 0.0;
  open.push({heuristic(start), heuristic(start), start.col, start.row, 0.0});

  GridIndex closest = start;
  double closest_h = heuristic(start);

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const GridIndex cur{top.col, top.row};
    const std::size_t ci = grid.linear(cur);
    if (closed[ci] || top.g != g[ci]) continue;
    closed[ci] = 1;
    ++result.expanded;
    result.h2d_min = std::min(result.h2d_min, manhattan_m(grid, cur, goal));
    if (top.h < closest_h) {
      closest_h = top.h;
      closest = cur;
    }

    if (cur == goal) {
      result.outcome = GroundOutcome::reached_goal;
      result.partial_path = reconstruct(cur);
      result.path_energy = g[ci];
      result.decision = decision[ci];
      return result;
    }

    const std::optional<Heading> prev =
        parent[ci] >= 0 ? std::optional<Heading>(heading[ci]) : std::nullopt;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dc == 0 && dr == 0) continue;
        const GridIndex nb{cur.col + dc, cur.row + dr};
        if (!grid.in_bounds(nb)) continue;
        const std::size_t ni = grid.linear(nb);
        if (closed[ni]) continue;
        if (!mask[ni]) {
          closed[ni] = 1;
          continue;
        }
        const double ng = g[ci] + segment_energy(energy, drive_segment(grid, cur, nb), false);
        if (ng > battery.remaining()) {
          result.battery_limited = true;
          continue;
        }
        if (!(ng < g[ni])) continue;

        TakeoffDecision next = decision[ci];
        if (options.detect_takeoff) {
          next = takeoff_decision_step(next, dof_between(grid, cur, nb, prev, limits.turn_weight),
                                       limits);
          if (next.flag) {
            next.trigger_node = cur;
            result.outcome = GroundOutcome::takeoff_required;
            result.switching_point = cur;
            result.partial_path = reconstruct(cur);
            result.path_energy = g[ci];
            result.decision = next;
            return result;
          }
        }
        g[ni] = ng;
        parent[ni] = static_cast<std::int64_t>(ci);
        decision[ni] = next;
        heading[ni] = {dc, dr};
        const double h = heuristic(nb);
        open.push({ng + h, h, nb.col, nb.row, ng});
      }
    }
  }

  result.outcome = GroundOutcome::exhausted;
  result.partial_path = reconstruct(closest);
  result.path_energy = g[grid.linear(closest)];
  return result;
}

}  // namespace agplan
