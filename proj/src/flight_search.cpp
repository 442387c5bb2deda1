#include "agplan/flight_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

#include "agplan/ground_search.hpp"
#include "agplan/kernels.hpp"

namespace agplan {

std::string to_string(FlightStage stage) {
  switch (stage) {
    case FlightStage::takeoff: return "takeoff";
    case FlightStage::escape: return "escape";
    case FlightStage::landing: return "landing";
  }
  return "takeoff";
}

std::string to_string(FlightMode mode) { return mode == FlightMode::direct ? "direct" : "escape"; }

std::string to_string(FlightOutcome outcome) {
  switch (outcome) {
    case FlightOutcome::landed: return "landed";
    case FlightOutcome::reached_goal: return "reached-goal";
    case FlightOutcome::no_path: return "no-path";
    case FlightOutcome::battery_limit_landing: return "battery-limit-landing";
  }
  return "no-path";
}

FlightParams FlightParams::defaults_for(double cell_size) {
  FlightParams p;
  p.c_escape = 2.0 * cell_size;
  p.c_landing = 10.0 * cell_size;
  p.voxel_size = cell_size;
  p.epsilon = p.voxel_size / 2.0;
  p.near_goal_radius = 15.0 * cell_size;
  return p;
}

void FlightParams::validate() const {
  if (!(c_escape > 0.0) || !(c_escape < c_landing)) {
    throw ConfigError("flight parameters need 0 < c_escape < c_landing");
  }
  if (!(epsilon > 0.0)) throw ConfigError("flight.epsilon must be positive");
  if (!(voxel_size > 0.0)) throw ConfigError("flight.voxel_size must be positive");
  if (!(near_goal_radius >= 0.0)) throw ConfigError("flight.near_goal_radius must be >= 0");
  if (!(heuristic_weight >= 0.0)) throw ConfigError("flight.heuristic_weight must be >= 0");
}

void FlightParams::validate(const TerrainGrid& grid) const {
  validate();
  if (z_ceiling && !(*z_ceiling > grid.max_elevation())) {
    throw ConfigError("flight.z_ceiling must be above the highest terrain");
  }
}

FlightStage stage_for(double delta_h2d, const FlightParams& params) {
  if (delta_h2d < params.c_escape) return FlightStage::takeoff;
  if (delta_h2d < params.c_landing) return FlightStage::escape;
  return FlightStage::landing;
}

double trap_escape_heuristic(TrapEscapeState& state, double z_curr, double z_ground,
                             const FlightParams& params, double flight_soc_delta,
                             double soc_ref) {
  if (state.h2d0 < state.h2d) state.h2d0 = state.h2d;
  const double delta = state.h2d0 - state.h2d;
  state.stage = stage_for(delta, params);
  switch (state.stage) {
    case FlightStage::takeoff: state.z_dummy = z_curr + params.epsilon; break;
    case FlightStage::escape: state.z_dummy = z_curr; break;
    case FlightStage::landing: state.z_dummy = z_ground; break;
  }
  state.soc_override_active = params.soc_override && flight_soc_delta > soc_ref;
  if (state.soc_override_active) {
    state.z_dummy = z_ground;
    state.stage = FlightStage::landing;
  }
  return state.h2d + std::abs(state.z_dummy - z_curr);
}

double trap_escape_heuristic(TrapEscapeState& state, double z_curr, double z_ground,
                             const FlightParams& params, const BatteryState& battery) {
  return trap_escape_heuristic(state, z_curr, z_ground, params, battery.flight_soc_delta(),
                               battery.soc_ref());
}

FlightMode select_flight_mode(double h2d_to_goal, const FlightParams& params) {
  return h2d_to_goal <= params.near_goal_radius ? FlightMode::direct : FlightMode::escape;
}

Segment fly_segment(const Vec3& a, const Vec3& b) { return {distance(a, b), b.z - a.z, Mode::fly}; }

// --- voxel space -------------------------------------------------------------

namespace {
constexpr double kLayerTol = 1e-9;
}

VoxelSpace::VoxelSpace(const TerrainGrid& grid, const FlightParams& params)
    : grid_(&grid), vz_(params.voxel_size) {
  params.validate(grid);
  const double lo = grid.min_elevation();
  const double hi = grid.max_elevation();
  z_base_ = std::floor(lo / vz_) * vz_;
  ceiling_ = params.z_ceiling ? *params.z_ceiling : hi + 5.0 * vz_;
  top_ = static_cast<int>(std::floor((ceiling_ - z_base_) / vz_ + kLayerTol));
  surface_.assign(grid.cell_count(), -1);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const GridIndex c = grid.unlinear(i);
    if (grid.is_nodata(c)) continue;
    const double e = grid.elevations()[i];
    const int k = static_cast<int>(std::ceil((e - z_base_) / vz_ - kLayerTol));
    surface_[i] = k <= top_ ? k : -1;
  }
}

bool VoxelSpace::column_open(GridIndex cell) const {
  return grid_->in_bounds(cell) && surface_[grid_->linear(cell)] >= 0;
}

bool VoxelSpace::valid(const Voxel& v) const {
  return column_open(v.cell) && v.layer >= surface_layer(v.cell) && v.layer <= top_;
}

Vec3 VoxelSpace::position(const Voxel& v) const {
  const double cs = grid_->cell_size();
  const double z = v.layer == surface_layer(v.cell) ? grid_->elevations()[grid_->linear(v.cell)]
                                                     : z_base_ + v.layer * vz_;
  return {v.cell.col * cs, v.cell.row * cs, z};
}

Voxel VoxelSpace::at_altitude(GridIndex cell, double z) const {
  const int k = static_cast<int>(std::ceil((z - z_base_) / vz_ - kLayerTol));
  return {cell, std::clamp(k, surface_layer(cell), top_)};
}

std::size_t VoxelSpace::index(const Voxel& v) const {
  return grid_->linear(v.cell) * static_cast<std::size_t>(top_ + 1) +
         static_cast<std::size_t>(v.layer);
}

std::size_t VoxelSpace::size() const {
  return grid_->cell_count() * static_cast<std::size_t>(top_ + 1);
}

// --- 3D A* -------------------------------------------------------------------

namespace {

struct Entry {
  double f;
  double h;
  int col;
  int row;
  int layer;
  double g;
};

struct EntryOrder {
  bool operator()(const Entry& a, const Entry& b) const {
    return std::tie(a.f, a.h, a.col, a.row, a.layer) > std::tie(b.f, b.h, b.col, b.row, b.layer);
  }
};

enum class SearchKind { escape, direct };

struct SearchSetup {
  SearchKind kind;
  Voxel start;
  Voxel goal;
  double h2d0_seed = 0.0;
  const MobilityLimits* limits = nullptr;
};

FlightSearchResult run_search(const VoxelSpace& space, const SearchSetup& setup,
                              const FlightParams& params, const EnergyParams& energy,
                              const BatteryState& battery) {
  const TerrainGrid& grid = space.grid();
  FlightSearchResult result;
  if (!space.valid(setup.start)) throw ContractError("flight start voxel is not free");
  if (!space.valid(setup.goal)) throw ContractError("flight goal voxel is not free");

  std::vector<std::uint8_t> landable;
  if (setup.kind == SearchKind::escape) landable = feasibility_mask(grid, *setup.limits);

  const double per_meter = params.heuristic_weight * fly_energy_per_meter(energy);
  const Vec3 goal_pos = space.position(setup.goal);
  const bool track_soc = battery.in_flight();

  TrapEscapeState trap;
  trap.h2d0 = setup.h2d0_seed;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = space.size();
  std::vector<double> g(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  std::vector<FlightStage> stage(n, FlightStage::takeoff);
  std::vector<std::uint8_t> forced(n, 0);

  // Returns the heuristic in joules and records the node's stage.
  const auto evaluate = [&](const Voxel& v, double g_cost) {
    const Vec3 p = space.position(v);
    const std::size_t vi = space.index(v);
    if (setup.kind == SearchKind::direct) {
      stage[vi] = FlightStage::escape;
      return per_meter * (std::abs(p.x - goal_pos.x) + std::abs(p.y - goal_pos.y) +
                          std::abs(p.z - goal_pos.z));
    }
    trap.h2d = manhattan_m(grid, v.cell, setup.goal.cell);
    const double soc_delta = track_soc ? battery.projected_flight_soc_delta(g_cost) : 0.0;
    const double h_m = trap_escape_heuristic(trap, p.z, grid.elevations()[grid.linear(v.cell)],
                                             params, soc_delta, battery.soc_ref());
    stage[vi] = trap.stage;
    forced[vi] = trap.soc_override_active ? 1 : 0;
    return per_meter * h_m;
  };

  const auto reconstruct = [&](const Voxel& end) {
    std::vector<FlightNode> path;
    for (std::int64_t i = static_cast<std::int64_t>(space.index(end)); i >= 0;
         i = parent[static_cast<std::size_t>(i)]) {
      const auto u = static_cast<std::size_t>(i);
      const std::size_t layers = static_cast<std::size_t>(space.top_layer() + 1);
      const Voxel v{grid.unlinear(u / layers), static_cast<int>(u % layers)};
      path.push_back({v, space.position(v), stage[u]});
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  std::priority_queue<Entry, std::vector<Entry>, EntryOrder> open;
  const std::size_t si = space.index(setup.start);
  g[si] = 0.0;
  {
    const double h = evaluate(setup.start, 0.0);
    open.push({h, h, setup.start.cell.col, setup.start.cell.row, setup.start.layer, 0.0});
  }

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const Voxel cur{{top.col, top.row}, top.layer};
    const std::size_t ci = space.index(cur);
    if (closed[ci] || top.g != g[ci]) continue;
    closed[ci] = 1;
    ++result.expanded;

    if (cur == setup.goal) {
      result.outcome = FlightOutcome::reached_goal;
      result.path = reconstruct(cur);
      result.path_energy = g[ci];
      return result;
    }
    if (setup.kind == SearchKind::escape && cur.layer == space.surface_layer(cur.cell) &&
        cur.cell != setup.start.cell && stage[ci] == FlightStage::landing &&
        landable[grid.linear(cur.cell)]) {
      result.outcome = forced[ci] ? FlightOutcome::battery_limit_landing : FlightOutcome::landed;
      result.path = reconstruct(cur);
      result.landing_point = cur.cell;
      result.path_energy = g[ci];
      return result;
    }

    const Vec3 cp = space.position(cur);
    for (int dk = -1; dk <= 1; ++dk) {
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dc == 0 && dr == 0 && dk == 0) continue;
          const Voxel nb{{cur.cell.col + dc, cur.cell.row + dr}, cur.layer + dk};
          if (!space.valid(nb)) continue;
          const std::size_t ni = space.index(nb);
          if (closed[ni]) continue;
          const Vec3 np = space.position(nb);
          const double ng = g[ci] + segment_energy(energy, fly_segment(cp, np), false);
          if (!(ng < g[ni])) continue;
          if (battery.projected_soc(ng) < 0.0) {
            result.battery_limited = true;
            continue;
          }
          g[ni] = ng;
          parent[ni] = static_cast<std::int64_t>(ci);
          const double h = evaluate(nb, ng);
          open.push({ng + h, h, nb.cell.col, nb.cell.row, nb.layer, ng});
        }
      }
    }
  }
  result.outcome = FlightOutcome::no_path;
  return result;
}

}  // namespace

FlightSearchResult search_flight_escape(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                                        double h2d0_seed, const FlightParams& params,
                                        const MobilityLimits& limits, const EnergyParams& energy,
                                        const BatteryState& battery) {
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw ContractError("flight start/goal out of bounds");
  }
  const VoxelSpace space(grid, params);
  SearchSetup setup{SearchKind::escape, space.surface(start), space.surface(goal), h2d0_seed,
                    &limits};
  return run_search(space, setup, params, energy, battery);
}

FlightSearchResult search_flight_direct(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                                        const FlightParams& params, const EnergyParams& energy,
                                        const BatteryState& battery, std::optional<double> goal_z) {
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw ContractError("flight start/goal out of bounds");
  }
  const VoxelSpace space(grid, params);
  const Voxel target = goal_z ? space.at_altitude(goal, *goal_z) : space.surface(goal);
  return search_flight_between(space, space.surface(start), target, params, energy, battery);
}

FlightSearchResult search_flight_between(const VoxelSpace& space, Voxel start, Voxel goal,
                                         const FlightParams& params, const EnergyParams& energy,
                                         const BatteryState& battery) {
  SearchSetup setup{SearchKind::direct, start, goal, 0.0, nullptr};
  return run_search(space, setup, params, energy, battery);
}

}  // namespace agplan
