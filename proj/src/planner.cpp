#include "agplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agplan/ground_search.hpp"
#include "agplan/kernels.hpp"

namespace agplan {

PlannerConfig PlannerConfig::defaults_for(double cell_size) {
  PlannerConfig c;
  c.flight = FlightParams::defaults_for(cell_size);
  c.bas = BasParams::defaults_for(cell_size);
  return c;
}

void PlannerConfig::validate() const {
  energy.validate();
  battery.validate();
  limits.validate();
  flight.validate();
  bas.validate();
  if (max_switches < 0) throw ConfigError("planner.max_switches must be >= 0");
  if (smoothing_samples < 2) throw ConfigError("planner.smoothing_samples must be >= 2");
}

void PlannerConfig::validate(const TerrainGrid& grid) const {
  validate();
  flight.validate(grid);
}

std::string to_string(SwitchDirection direction) {
  return direction == SwitchDirection::ground_to_air ? "ground-to-air" : "air-to-ground";
}

SwitchOptimizer bas_optimizer(const BasParams& params) {
  return [params](const SwitchDomain& domain, const FitnessFn& fitness, std::size_t k) {
    BasParams p = params;
    p.seed = params.seed + k;
    return optimize_switch_point(domain, fitness, p);
  };
}

namespace {

std::vector<ModeLeg> split_legs(const std::vector<PathNode>& nodes) {
  std::vector<ModeLeg> legs;
  if (nodes.empty()) return legs;
  ModeLeg cur{nodes.size() > 1 ? nodes[1].mode : nodes[0].mode, 0, 0};
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].mode != cur.mode) {
      cur.last = i - 1;
      legs.push_back(cur);
      cur = {nodes[i].mode, i - 1, i - 1};
    }
  }
  cur.last = nodes.size() - 1;
  legs.push_back(cur);
  return legs;
}

// Accumulates nodes and debits the battery as it goes.
class PathBuilder {
 public:
  PathBuilder(const EnergyParams& energy, const BatterySettings& battery)
      : energy_(energy), battery_(battery) {
    path_.initial_soc = battery_.soc();
  }

  BatteryState& battery() { return battery_; }
  const PathNode& back() const { return path_.nodes.back(); }

  void start(const Vec3& p) { path_.nodes.push_back({p, Mode::drive, 0.0, battery_.soc(), false}); }

  void append(const Vec3& p, Mode mode) {
    const PathNode& last = path_.nodes.back();
    const Segment seg{distance(last.position, p), p.z - last.position.z, mode};
    const double e = segment_energy(energy_, seg, last.is_switch_point);
    try {
      battery_.debit(e);
    } catch (const BatteryExhaustedError& ex) {
      throw PlanBatteryError(ex.what(), finish());
    }
    path_.total_distance += seg.delta_d;
    path_.nodes.push_back({p, mode, battery_.consumed(), battery_.soc(), false});
  }

  void mark_switch(SwitchRecord rec) {
    path_.nodes.back().is_switch_point = true;
    rec.index = path_.nodes.size() - 1;
    path_.switch_points.push_back(std::move(rec));
  }

  void log_flight(FlightLog log) { path_.flights.push_back(std::move(log)); }
  void set_reached() { path_.reached_goal = true; }

  PlannedPath finish() const {
    PlannedPath out = path_;
    out.total_energy = battery_.consumed();
    out.legs = split_legs(out.nodes);
    return out;
  }

 private:
  EnergyParams energy_;
  BatteryState battery_;
  PlannedPath path_;
};

// A point `reach` metres from `from` towards `goal` (never past the goal).
// In the air it clears the highest terrain under the line by one voxel; on
// the ground it sits on the surface.
Vec3 point_ahead(const TerrainGrid& grid, GridIndex from, GridIndex goal, double reach, bool air,
                 double clearance) {
  const Vec3 a = grid.surface_point(from);
  const Vec3 g = grid.surface_point(goal);
  const double d = horizontal_distance(a, g);
  if (d == 0.0) return air ? Vec3{a.x, a.y, a.z + clearance} : a;
  const double r = std::min(reach, d);
  const double ux = (g.x - a.x) / d;
  const double uy = (g.y - a.y) / d;
  const double cs = grid.cell_size();
  const double x = std::clamp(a.x + ux * r, 0.0, (grid.ncols() - 1) * cs);
  const double y = std::clamp(a.y + uy * r, 0.0, (grid.nrows() - 1) * cs);
  const GridIndex end = grid.nearest_cell(x, y);
  if (!air) {
    return grid.is_nodata(end) ? Vec3{x, y, a.z} : Vec3{x, y, grid.elevation_at(end)};
  }
  double top = a.z;
  const int steps = static_cast<int>(std::ceil(2.0 * r / cs));
  for (int i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : r * i / steps;
    const GridIndex c = grid.nearest_cell(a.x + ux * t, a.y + uy * t);
    if (!grid.is_nodata(c)) top = std::max(top, grid.elevation_at(c));
  }
  return {x, y, top + clearance};
}

// Ground path start..target: the existing path up to its node nearest to
// the target, then a short repair search.
std::optional<std::vector<GridIndex>> repair_ground(const TerrainGrid& grid,
                                                    const std::vector<GridIndex>& path,
                                                    GridIndex target, const PlannerConfig& cfg,
                                                    const BatteryState& battery) {
  const Vec3 t = grid.surface_point(target);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double d = horizontal_distance(grid.surface_point(path[i]), t);
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  std::vector<GridIndex> out(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(best) + 1);
  if (path[best] == target) return out;
  const GroundSearchResult sub =
      search_ground(grid, path[best], target, cfg.limits, cfg.energy, battery, {false});
  if (sub.outcome != GroundOutcome::reached_goal) return std::nullopt;
  out.insert(out.end(), sub.partial_path.begin() + 1, sub.partial_path.end());
  return out;
}

}  // namespace

SwitchContext takeoff_context(const TerrainGrid& grid, const std::vector<GridIndex>& ground_path,
                              GridIndex goal, const PlannerConfig& cfg) {
  if (ground_path.empty()) throw ContractError("takeoff context needs a ground path");
  const double cs = grid.cell_size();
  const auto k_back = static_cast<std::size_t>(std::ceil(cfg.bas.search_radius / cs));
  const std::size_t pre_i = ground_path.size() - 1 - std::min(k_back, ground_path.size() - 1);
  return {grid.surface_point(ground_path[pre_i]), Mode::drive,
          point_ahead(grid, ground_path.back(), goal, cfg.bas.search_radius + cs, true,
                      cfg.flight.voxel_size),
          Mode::fly};
}

FitnessWeights switch_weights(const BasParams& bas, double soc) {
  return {bas.alpha_for(soc), bas.w_a, bas.w_b, bas.w_c};
}

PlannedPath plan(const TerrainGrid& grid, GridIndex start, GridIndex goal,
                 const PlannerConfig& cfg, const SwitchOptimizer& optimizer_in) {
  cfg.validate(grid);
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw ContractError("start or goal outside the terrain");
  }
  const std::vector<std::uint8_t> mask = feasibility_mask(grid, cfg.limits);
  if (!mask[grid.linear(start)]) throw ContractError("start cell is not drivable");
  if (!mask[grid.linear(goal)]) throw ContractError("goal cell is not drivable");

  const SwitchOptimizer optimizer = optimizer_in ? optimizer_in : bas_optimizer(cfg.bas);
  const VoxelSpace space(grid, cfg.flight);
  const double cs = grid.cell_size();
  const auto k_back = static_cast<std::size_t>(std::ceil(cfg.bas.search_radius / cs));
  const double reach = cfg.bas.search_radius + cs;

  PathBuilder b(cfg.energy, cfg.battery);
  b.start(grid.surface_point(start));
  GridIndex cur = start;
  std::size_t n_switch = 0;

  const auto cap_check = [&]() {
    if (n_switch >= static_cast<std::size_t>(cfg.max_switches)) {
      throw SwitchCapError("switch limit of " + std::to_string(cfg.max_switches) + " reached",
                           b.finish());
    }
  };

  for (;;) {
    const GroundSearchResult gr =
        search_ground(grid, cur, goal, cfg.limits, cfg.energy, b.battery());
    if (gr.outcome == GroundOutcome::reached_goal) {
      for (std::size_t i = 1; i < gr.partial_path.size(); ++i) {
        b.append(grid.surface_point(gr.partial_path[i]), Mode::drive);
      }
      b.set_reached();
      return b.finish();
    }
    if (gr.outcome == GroundOutcome::exhausted && gr.battery_limited) {
      throw PlanBatteryError("battery too low to reach the goal on the ground", b.finish());
    }
    if (gr.outcome == GroundOutcome::exhausted) {
      throw NoPathError("goal unreachable on the ground and no takeoff was triggered", b.finish());
    }

    // Ground to air.
    cap_check();
    std::vector<GridIndex> ground = gr.partial_path;
    const GridIndex initial_takeoff = *gr.switching_point;
    GridIndex takeoff = initial_takeoff;
    SwitchRecord up;
    up.direction = SwitchDirection::ground_to_air;
    up.initial_cell = initial_takeoff;
    up.initial_point = grid.surface_point(initial_takeoff);
    if (cfg.optimize) {
      const SwitchDomain domain(grid, initial_takeoff, cfg.bas.search_radius, mask);
      const SwitchContext ctx = takeoff_context(grid, ground, goal, cfg);
      const FitnessFn fit = make_switch_fitness(domain, cfg.limits, cfg.energy, ctx,
                                                switch_weights(cfg.bas, b.battery().soc()));
      SwitchResult r = optimizer(domain, fit, n_switch);
      up.initial_fitness = r.initial_fitness;
      up.optimized_fitness = r.initial_fitness;
      up.evaluations = r.evaluations;
      up.trace = std::move(r.trace);
      if (r.point != initial_takeoff) {
        if (auto repaired = repair_ground(grid, ground, r.point, cfg, b.battery())) {
          ground = std::move(*repaired);
          takeoff = r.point;
          up.optimized_fitness = r.fitness;
        }
      }
    }
    up.optimized_cell = takeoff;
    up.optimized_point = grid.surface_point(takeoff);
    for (std::size_t i = 1; i < ground.size(); ++i) {
      b.append(grid.surface_point(ground[i]), Mode::drive);
    }
    b.mark_switch(std::move(up));
    ++n_switch;
    b.battery().mark_takeoff();

    // Progress in the air counts from the ground leg's closest approach,
    // which includes the repaired stretch to the takeoff point.
    const FlightMode mode = select_flight_mode(manhattan_m(grid, takeoff, goal), cfg.flight);
    FlightSearchResult fr =
        mode == FlightMode::direct
            ? search_flight_direct(grid, takeoff, goal, cfg.flight, cfg.energy, b.battery())
            : search_flight_escape(grid, takeoff, goal,
                                   std::min(gr.h2d_min, manhattan_m(grid, takeoff, goal)),
                                   cfg.flight, cfg.limits, cfg.energy, b.battery());
    if (fr.outcome == FlightOutcome::no_path && fr.battery_limited) {
      throw PlanBatteryError("battery too low for any flight route from the takeoff point",
                             b.finish());
    }
    if (fr.outcome == FlightOutcome::no_path) {
      throw NoPathError("no flight route from the takeoff point", b.finish());
    }

    FlightLog log{mode, fr.outcome, {}, std::nullopt};
    for (const FlightNode& n : fr.path) log.stages.push_back(n.stage);
    const auto append_flight = [&](const std::vector<FlightNode>& nodes) {
      for (std::size_t i = 1; i < nodes.size(); ++i) b.append(nodes[i].position, Mode::fly);
      b.log_flight(log);
    };

    if (fr.outcome == FlightOutcome::reached_goal) {
      append_flight(fr.path);
      b.set_reached();
      return b.finish();
    }

    // Air to ground.
    if (n_switch >= static_cast<std::size_t>(cfg.max_switches)) {
      append_flight(fr.path);
      cap_check();
    }
    std::vector<FlightNode> flight = fr.path;
    const GridIndex initial_landing = *fr.landing_point;
    GridIndex landing = initial_landing;
    SwitchRecord down;
    down.direction = SwitchDirection::air_to_ground;
    down.initial_cell = initial_landing;
    down.initial_point = grid.surface_point(initial_landing);
    if (cfg.optimize) {
      const SwitchDomain domain(grid, initial_landing, cfg.bas.search_radius, mask);
      const std::size_t pre_i = flight.size() - 1 - std::min(k_back, flight.size() - 1);
      const SwitchContext ctx{flight[pre_i].position, Mode::fly,
                              point_ahead(grid, initial_landing, goal, reach, false, 0.0),
                              Mode::drive};
      const double soc_now = b.battery().projected_soc(fr.path_energy);
      const FitnessFn fit = make_switch_fitness(domain, cfg.limits, cfg.energy, ctx,
                                                switch_weights(cfg.bas, soc_now));
      SwitchResult r = optimizer(domain, fit, n_switch);
      down.initial_fitness = r.initial_fitness;
      down.optimized_fitness = r.initial_fitness;
      down.evaluations = r.evaluations;
      down.trace = std::move(r.trace);
      if (r.point != initial_landing) {
        double prefix = 0.0;
        for (std::size_t i = 1; i <= pre_i; ++i) {
          prefix += segment_energy(cfg.energy,
                                   fly_segment(flight[i - 1].position, flight[i].position), false);
        }
        if (b.battery().remaining() - prefix >= 0.0) {
          const FlightSearchResult tail =
              search_flight_between(space, flight[pre_i].voxel, space.surface(r.point), cfg.flight,
                                    cfg.energy, b.battery().debited(prefix));
          if (tail.outcome == FlightOutcome::reached_goal) {
            flight.resize(pre_i + 1);
            log.repaired_from = pre_i;
            for (std::size_t i = 1; i < tail.path.size(); ++i) {
              flight.push_back({tail.path[i].voxel, tail.path[i].position, FlightStage::landing});
            }
            landing = r.point;
            down.optimized_fitness = r.fitness;
          }
        }
      }
    }
    down.optimized_cell = landing;
    down.optimized_point = grid.surface_point(landing);
    append_flight(flight);
    b.mark_switch(std::move(down));
    ++n_switch;
    b.battery().mark_landing();
    cur = landing;
  }
}

// --- smoothing -------------------------------------------------------------

Vec3 bezier_point(const Vec3* c, double u) {
  const double v = 1.0 - u;
  return c[0] * (v * v * v) + c[1] * (3.0 * v * v * u) + c[2] * (3.0 * v * u * u) +
         c[3] * (u * u * u);
}

double polyline_distance(const Vec3& p, const std::vector<Vec3>& polyline) {
  if (polyline.empty()) return std::numeric_limits<double>::infinity();
  double best = distance(p, polyline.front());
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec3 a = polyline[i - 1];
    const Vec3 ab = polyline[i] - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(p, a + ab * t));
  }
  return best;
}

namespace {

void push_line(std::vector<Vec3>& ctrl, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  ctrl.insert(ctrl.end(), {a, a + d / 3.0, a + d * (2.0 / 3.0), b});
}

// Quadratic a -> b with control c, raised to cubic.
void push_quadratic(std::vector<Vec3>& ctrl, const Vec3& a, const Vec3& c, const Vec3& b) {
  ctrl.insert(ctrl.end(), {a, a + (c - a) * (2.0 / 3.0), b + (c - b) * (2.0 / 3.0), b});
}

SmoothedLeg smooth_leg(Mode mode, std::vector<Vec3> pts, int samples) {
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  SmoothedLeg leg;
  leg.mode = mode;
  if (pts.size() == 1) {
    leg.control_points.assign(4, pts[0]);
  } else if (pts.size() == 2) {
    push_line(leg.control_points, pts[0], pts[1]);
  } else {
    const std::size_t n = pts.size() - 1;
    std::vector<Vec3> mid(n);
    for (std::size_t i = 0; i < n; ++i) mid[i] = (pts[i] + pts[i + 1]) / 2.0;
    push_line(leg.control_points, pts[0], mid[0]);
    for (std::size_t i = 1; i < n; ++i) push_quadratic(leg.control_points, mid[i - 1], pts[i], mid[i]);
    push_line(leg.control_points, mid[n - 1], pts[n]);
  }

  const std::size_t pieces = leg.control_points.size() / 4;
  leg.samples.resize(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) {
    const double pos = static_cast<double>(j) / (samples - 1) * static_cast<double>(pieces);
    const std::size_t piece = std::min(static_cast<std::size_t>(pos), pieces - 1);
    const double u = pos - static_cast<double>(piece);
    leg.samples[static_cast<std::size_t>(j)] = bezier_point(&leg.control_points[4 * piece], u);
  }
  leg.samples.front() = pts.front();
  leg.samples.back() = pts.back();
  return leg;
}

}  // namespace

SmoothedPath smooth(const PlannedPath& path, int samples_per_leg) {
  if (path.nodes.size() < 2) throw ContractError("smoothing needs at least two nodes");
  if (samples_per_leg < 2) throw ContractError("smoothing needs at least two samples per leg");
  SmoothedPath out;
  const std::vector<ModeLeg> legs = path.legs.empty() ? split_legs(path.nodes) : path.legs;
  for (const ModeLeg& l : legs) {
    std::vector<Vec3> raw;
    for (std::size_t i = l.first; i <= l.last; ++i) raw.push_back(path.nodes[i].position);
    SmoothedLeg leg = smooth_leg(l.mode, raw, samples_per_leg);
    for (const Vec3& s : leg.samples) {
      out.max_deviation = std::max(out.max_deviation, polyline_distance(s, raw));
    }
    const std::size_t skip = out.samples.empty() ? 0 : 1;
    out.samples.insert(out.samples.end(), leg.samples.begin() + static_cast<std::ptrdiff_t>(skip),
                       leg.samples.end());
    out.legs.push_back(std::move(leg));
  }
  return out;
}

// --- accounting ------------------------------------------------------------

EnergyAccount recompute_account(const PlannedPath& path, const EnergyParams& energy,
                                const BatterySettings& battery) {
  EnergyAccount acc;
  const std::vector<ModeLeg> legs = path.legs.empty() ? split_legs(path.nodes) : path.legs;
  for (const ModeLeg& l : legs) acc.per_leg.push_back({l.mode, 0.0, 0.0});
  if (!path.nodes.empty()) {
    acc.cumulative.push_back(0.0);
    acc.soc_trace.push_back(battery.q_initial / battery.q_capacity);
  }
  std::size_t leg = 0;
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    while (leg + 1 < legs.size() && i > legs[leg].last) ++leg;
    const PathNode& a = path.nodes[i - 1];
    const PathNode& b = path.nodes[i];
    const Segment seg{distance(a.position, b.position), b.position.z - a.position.z, b.mode};
    const double e = segment_energy(energy, seg, a.is_switch_point);
    if (a.is_switch_point) ++acc.transforms;
    acc.total_energy += e;
    acc.total_distance += seg.delta_d;
    if (!acc.per_leg.empty()) {
      acc.per_leg[leg].joules += e;
      acc.per_leg[leg].meters += seg.delta_d;
    }
    acc.cumulative.push_back(acc.total_energy);
    acc.soc_trace.push_back((battery.q_initial - acc.total_energy) / battery.q_capacity);
  }
  return acc;
}

EnergyAccount account(const PlannedPath& path, const EnergyParams& energy,
                      const BatterySettings& battery) {
  const EnergyAccount acc = recompute_account(path, energy, battery);
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    if (!close(path.nodes[i].cumulative_energy, acc.cumulative[i])) {
      throw InternalConsistencyError("cumulative energy mismatch at node " + std::to_string(i));
    }
    if (!close(path.nodes[i].soc, acc.soc_trace[i])) {
      throw InternalConsistencyError("soc mismatch at node " + std::to_string(i));
    }
  }
  if (!close(path.total_energy, acc.total_energy)) {
    throw InternalConsistencyError("total energy mismatch");
  }
  if (!close(path.total_distance, acc.total_distance)) {
    throw InternalConsistencyError("total distance mismatch");
  }
  return acc;
}

}  // namespace agplan
