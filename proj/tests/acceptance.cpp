// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "agplan/cli.hpp"
#include "agplan/harness.hpp"
#include "agplan/io.hpp"
#include "agplan/planner.hpp"
#include "agplan/switch_opt.hpp"
#include "oracles.hpp"

using namespace agplan;

namespace {

constexpr double kEnergyRelTol = 1e-9;
constexpr double kLedgerRelTol = 1e-9;
constexpr double kColinearTol = 1e-9;
constexpr double kHullTol = 1e-9;
constexpr double kBowlWithin = 0.05;
constexpr int kBowlRequired = 80;
constexpr double kOracleSeconds = 10.0;

struct Verdict {
  bool pass = true;
  std::string detail;
};

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

Verdict optimality_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const EnergyParams energy;
  const MobilityLimits limits;
  const BatteryState battery;
  int mismatches = 0;
  std::size_t blocked = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const TerrainGrid grid = oracle::random_terrain(seed);
    const auto mask = feasibility_mask(grid, limits);
    blocked += static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 0));
    const auto first = std::find(mask.begin(), mask.end(), 1);
    if (first == mask.end()) {
      ++mismatches;
      continue;
    }
    const GridIndex start = grid.unlinear(static_cast<std::size_t>(first - mask.begin()));
    const auto ref = oracle::dijkstra(grid, start, mask, energy);
    std::size_t goal_i = 0;
    for (std::size_t i = 0; i < ref.dist.size(); ++i) {
      if (std::isfinite(ref.dist[i])) goal_i = i;
    }
    const GridIndex goal = grid.unlinear(goal_i);
    const auto r = search_ground(grid, start, goal, limits, energy, battery, {.detect_takeoff = false});
    if (r.outcome != GroundOutcome::reached_goal || r.path_energy != ref.dist[goal_i] ||
        drive_path_energy(grid, r.partial_path, energy) != ref.dist[goal_i]) {
      ++mismatches;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v.pass = mismatches == 0 && secs < kOracleSeconds && blocked > 0;
  v.detail = std::to_string(100 - mismatches) + "/100 exact, " + fmt(secs) + " s, " +
             std::to_string(blocked) + " blocked cells";
  return v;
}

Verdict energy_hand_checks() {
  const EnergyParams p;
  const double hover = hover_energy(p, {12.0, 0.0, Mode::fly});
  const double move = move_energy(p, {12.0, 0.0, Mode::drive});
  const double drag = move_energy(p, {12.0, 0.0, Mode::fly});
  Verdict v;
  v.pass = rel_close(hover, oracle::kHoverFly12, kEnergyRelTol) &&
           rel_close(move, oracle::kMoveDrive12, kEnergyRelTol) &&
           rel_close(drag, oracle::kDragFly12, kEnergyRelTol) && p.standby_energy == oracle::kStandby;
  v.detail = "hover " + fmt(hover) + " J, move " + fmt(move) + " J, standby " + fmt(p.standby_energy) + " J";
  return v;
}

Verdict takeoff_run_length() {
  const MobilityLimits limits;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_real_distribution<double> val(0.0, 0.5);
  std::bernoulli_distribution exact(0.1);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> dofs(static_cast<std::size_t>(len(rng)));
    for (double& d : dofs) d = exact(rng) ? limits.m_index : val(rng);
    // Bias half the sequences towards long violation runs.
    if (i % 2 == 0) {
      for (std::size_t k = dofs.size() / 2; k < dofs.size(); ++k) dofs[k] = std::max(dofs[k], limits.m_index + 0.01);
    }
    TakeoffDecision st;
    for (double d : dofs) st = takeoff_decision_step(st, d, limits);
    if (st.flag == oracle::run_length_flag(dofs, limits.m_index, limits.count_threshold) &&
        st.count == oracle::trailing_run(dofs, limits.m_index)) {
      ++agree;
    }
  }
  return {agree == 1000, std::to_string(agree) + "/1000 sequences agree"};
}

Verdict stage_table() {
  const FlightParams p = FlightParams::defaults_for(12.0);
  const double delta = 1e-6;
  const double h2d0 = 1000.0;
  const double z_curr = 40.0;
  const double z_ground = 10.0;
  struct Row {
    double dh;
    double expected_no_override;
  };
  const Row rows[] = {{0.0, z_curr + p.epsilon},
                      {p.c_escape - delta, z_curr + p.epsilon},
                      {p.c_escape, z_curr},
                      {p.c_landing - delta, z_curr},
                      {p.c_landing, z_ground},
                      {2.0 * p.c_landing, z_ground}};
  int ok = 0;
  for (const Row& row : rows) {
    for (const bool override_on : {false, true}) {
      TrapEscapeState st;
      st.h2d0 = h2d0;
      st.h2d = h2d0 - row.dh;
      const double soc_delta = override_on ? 0.2 : 0.0;
      const double h = trap_escape_heuristic(st, z_curr, z_ground, p, soc_delta, 0.15);
      const double want = override_on ? z_ground : row.expected_no_override;
      if (st.z_dummy == want && h == st.h2d + std::abs(want - z_curr)) ++ok;
    }
  }
  return {ok == 12, std::to_string(ok) + "/12 cases"};
}

Verdict ridge_end_to_end() {
  const Scenario& s = bundled_scenario("ridge");
  const TerrainGrid grid = scenario_terrain(s);
  const PlannerConfig cfg = scenario_config(s, grid);
  const PlannedPath path = plan(grid, s.start, s.goal, cfg);
  int fly_legs = 0;
  bool crosses = false;
  bool above = true;
  for (const ModeLeg& leg : path.legs) {
    if (leg.mode != Mode::fly) continue;
    ++fly_legs;
    const double x0 = path.nodes[leg.first].position.x;
    const double x1 = path.nodes[leg.last].position.x;
    const double crest_x = 24.0 * grid.cell_size();
    crosses = x0 < crest_x && x1 > crest_x + grid.cell_size();
    for (std::size_t i = leg.first; i <= leg.last; ++i) {
      const Vec3& q = path.nodes[i].position;
      if (q.z < grid.elevation_at(grid.nearest_cell(q.x, q.y)) - 1e-9) above = false;
    }
  }
  std::string stages;
  bool ordered = path.flights.size() == 1;
  if (ordered) {
    const auto& st = path.flights.front().stages;
    ordered = !st.empty() && std::is_sorted(st.begin(), st.end()) &&
              st.front() == FlightStage::takeoff && st.back() == FlightStage::landing &&
              std::find(st.begin(), st.end(), FlightStage::escape) != st.end();
    for (FlightStage f : st) stages += to_string(f).front();
  }
  Verdict v;
  v.pass = path.reached_goal && fly_legs == 1 && crosses && ordered && above;
  v.detail = std::to_string(fly_legs) + " fly leg, stages " + stages +
             (above ? ", all flight nodes above terrain" : ", node below terrain");
  return v;
}

Verdict bas_guarantees() {
  int monotone = 0;
  int retained = 0;
  int counted = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SynthSpec spec;
    spec.kind = SynthKind::random_smooth;
    spec.ncols = 24;
    spec.nrows = 24;
    spec.amplitude = 20.0 + static_cast<double>(seed % 5) * 5.0;
    spec.seed = seed;
    const TerrainGrid grid = synthesize_terrain(spec);
    const MobilityLimits limits;
    const auto mask = feasibility_mask(grid, limits);
    std::mt19937_64 rng(seed);
    GridIndex initial{12, 12};
    for (int tries = 0; tries < 200 && !mask[grid.linear(initial)]; ++tries) {
      initial = {6 + static_cast<int>(rng() % 12), 6 + static_cast<int>(rng() % 12)};
    }
    BasParams params = BasParams::defaults_for(grid.cell_size());
    params.seed = seed;
    const SwitchDomain domain(grid, initial, params.search_radius, mask);
    const SwitchContext ctx{grid.surface_point({initial.col - 3, initial.row}), Mode::drive,
                            grid.surface_point({initial.col + 5, initial.row + 2}) + Vec3{0, 0, 40},
                            Mode::fly};
    CountingFitness counter(make_switch_fitness(domain, limits, EnergyParams{}, ctx,
                                                FitnessWeights{params.alpha, 1, 1, 2}));
    const FitnessFn fit = counter.as_function();
    std::mt19937_64 bas_rng(params.seed);
    BasState st = bas_start(domain, fit, params);
    const double initial_f = st.best.f;
    bool mono = true;
    bool three = counter.count() == 1;
    for (int it = 0; it < params.iterations; ++it) {
      const double before = st.best.f;
      const std::size_t calls = counter.count();
      st = bas_step(std::move(st), params, domain, fit, bas_rng);
      if (st.best.f > before) mono = false;
      if (counter.count() - calls != 3) three = false;
    }
    monotone += mono;
    counted += three && st.evaluations == 1 + 3 * static_cast<std::size_t>(params.iterations);
    const SwitchResult r = optimize_switch_point(domain, fit, params);
    retained += st.best.f <= initial_f && r.fitness.f <= r.initial_fitness.f;
  }
  Verdict v;
  v.pass = monotone == 100 && retained == 100 && counted == 100;
  v.detail = "monotone " + std::to_string(monotone) + "/100, incumbent kept " +
             std::to_string(retained) + "/100, 3 evals/iteration " + std::to_string(counted) + "/100";
  return v;
}

Verdict savings_direction() {
  const auto runs = run_scenarios(bundled_scenarios());
  bool all_ok = true;
  std::string detail;
  double sloped = -1.0;
  for (const ScenarioRun& r : runs) {
    const bool ok = r.optimized.ok && r.unoptimized.ok && r.optimized.energy <= r.unoptimized.energy;
    all_ok = all_ok && ok;
    if (r.scenario == "sloped-ridge" && r.savings) sloped = *r.savings;
    detail += r.scenario + "=" + (r.savings ? fmt(std::round(*r.savings * 1e4) / 1e4) : "fail") + " ";
  }
  return {all_ok && sloped > 0.0, detail};
}

Verdict oracle_inequality() {
  int runs = 0;
  int exhaustive_min = 0;
  const std::size_t budget = 301;  // covers every cell of the 8-cell disk
  for (const Scenario& s : bundled_scenarios()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      MethodComparison c;
      try {
        c = run_method_comparison(s, budget, seed);
      } catch (const NoPathError&) {
        break;
      }
      ++runs;
      const double ex = c.methods.at(1).best_f;
      bool ok = true;
      for (const MethodResult& m : c.methods) ok = ok && ex <= m.best_f;
      exhaustive_min += ok;
    }
  }

  const BowlScenario bowl = bowl_scenario();
  const FitnessFn fit = bowl_fitness(bowl);
  const SwitchDomain domain(bowl.grid, bowl.initial, bowl.radius, bowl.drivable);
  double enum_best = std::numeric_limits<double>::infinity();
  for (GridIndex c : domain.cells()) enum_best = std::min(enum_best, fit(bowl.grid.surface_point(c)).f);
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    BasParams params = BasParams::defaults_for(bowl.grid.cell_size());
    params.seed = seed;
    const SwitchResult r = optimize_switch_point(domain, fit, params);
    within += r.fitness.f <= enum_best * (1.0 + kBowlWithin);
  }
  Verdict v;
  v.pass = runs > 0 && exhaustive_min == runs && within >= kBowlRequired;
  v.detail = "exhaustive minimal " + std::to_string(exhaustive_min) + "/" + std::to_string(runs) +
             ", bowl BAS within 5% " + std::to_string(within) + "/100";
  return v;
}

Verdict soc_ledger() {
  int plans = 0;
  int good = 0;
  for (const Scenario& s : bundled_scenarios()) {
    const TerrainGrid grid = scenario_terrain(s);
    for (const bool optimize : {true, false}) {
      PlannerConfig cfg = scenario_config(s, grid);
      cfg.optimize = optimize;
      PlannedPath path;
      try {
        path = plan(grid, s.start, s.goal, cfg);
      } catch (const PlanError&) {
        continue;
      }
      ++plans;
      bool ok = path.nodes.back().soc >= 0.0;
      for (std::size_t i = 1; i < path.nodes.size(); ++i) ok = ok && path.nodes[i].soc <= path.nodes[i - 1].soc;
      try {
        const EnergyAccount acc = account(path, cfg.energy, cfg.battery);
        ok = ok && rel_close(acc.total_energy, path.total_energy, kLedgerRelTol);
      } catch (const InternalConsistencyError&) {
        ok = false;
      }
      good += ok;
    }
  }
  return {plans > 0 && good == plans, std::to_string(good) + "/" + std::to_string(plans) + " plans consistent"};
}

Verdict smoothing_contract() {
  const auto dirs = oracle::probe_directions(64, 5);
  int legs = 0;
  int good_legs = 0;
  bool ends = true;
  for (const Scenario& s : bundled_scenarios()) {
    const TerrainGrid grid = scenario_terrain(s);
    const PlannerConfig cfg = scenario_config(s, grid);
    PlannedPath path;
    try {
      path = plan(grid, s.start, s.goal, cfg);
    } catch (const PlanError&) {
      continue;
    }
    const SmoothedPath sm = smooth(path, 1000);
    ends = ends && sm.samples.front() == path.nodes.front().position &&
           sm.samples.back() == path.nodes.back().position;
    for (std::size_t l = 0; l < sm.legs.size(); ++l) {
      const SmoothedLeg& leg = sm.legs[l];
      ends = ends && leg.samples.front() == path.nodes[path.legs[l].first].position &&
             leg.samples.back() == path.nodes[path.legs[l].last].position;
      double scale = 1.0;
      for (const Vec3& c : leg.control_points) scale = std::max({scale, std::abs(c.x), std::abs(c.y), std::abs(c.z)});
      bool in = leg.samples.size() >= 1000;
      for (const Vec3& p : leg.samples) in = in && oracle::within_hull(p, leg.control_points, dirs, kHullTol * scale);
      ++legs;
      good_legs += in;
    }
  }

  // A straight 3D leg must stay on its line.
  PlannedPath line;
  for (int i = 0; i <= 6; ++i) {
    PathNode n;
    n.position = {12.0 * i, 5.0 * i, 2.0 * i};
    line.nodes.push_back(n);
  }
  line.legs.push_back({Mode::drive, 0, 6});
  const SmoothedPath ls = smooth(line, 1000);
  std::vector<Vec3> poly;
  for (const PathNode& n : line.nodes) poly.push_back(n.position);
  double dev = 0.0;
  for (const Vec3& p : ls.samples) dev = std::max(dev, polyline_distance(p, poly));

  Verdict v;
  v.pass = ends && legs > 0 && good_legs == legs && dev < kColinearTol;
  v.detail = std::string(ends ? "ends exact" : "ends moved") + ", hull " + std::to_string(good_legs) +
             "/" + std::to_string(legs) + " legs, colinear deviation " + fmt(dev);
  return v;
}

std::vector<std::pair<std::string, std::string>> dir_files(const std::filesystem::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().filename() == "timings.csv") continue;  // wall-clock times
    out.emplace_back(e.path().filename().string(), read_file(e.path().string()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Verdict determinism_and_format() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("agplan_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const EnvLookup no_env = [](const std::string&) { return std::optional<std::string>{}; };
  std::ostringstream out;
  std::ostringstream err;
  const auto run = [&](std::vector<std::string> args) { return run_cli(args, out, err, no_env); };
  bool ok = true;
  for (const char* d : {"p1", "p2"}) {
    ok = ok && run({"agplan", "plan", "--scenario", "ridge", "--out", (root / d).string()}) == 0;
  }
  for (const char* d : {"c1", "c2"}) {
    ok = ok && run({"agplan", "compare", "--scenario", "ridge", "--scenario", "sloped-ridge",
                    "--seed", "7", "--out", (root / d).string()}) == 0;
  }
  const bool plan_same = ok && dir_files(root / "p1") == dir_files(root / "p2");
  const bool cmp_same = ok && dir_files(root / "c1") == dir_files(root / "c2");
  fs::remove_all(root);

  int round_trips = 0;
  int exact = 0;
  for (SynthKind kind : {SynthKind::flat, SynthKind::ramp, SynthKind::ridge, SynthKind::ring,
                         SynthKind::random_smooth}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      SynthSpec spec;
      spec.kind = kind;
      spec.ncols = 31;
      spec.nrows = 17;
      spec.cell_size = 12.0 + 0.1 * static_cast<double>(seed);
      spec.amplitude = 37.3 * static_cast<double>(seed);
      spec.base = 101.7;
      spec.seed = seed;
      const TerrainGrid a = synthesize_terrain(spec);
      std::istringstream in(write_dem_string(a));
      const TerrainGrid b = load_dem(in);
      ++round_trips;
      exact += std::equal(a.elevations().begin(), a.elevations().end(), b.elevations().begin(),
                          b.elevations().end()) &&
               a.cell_size() == b.cell_size() && a.ncols() == b.ncols() && a.nrows() == b.nrows();
    }
  }
  Verdict v;
  v.pass = plan_same && cmp_same && exact == round_trips;
  v.detail = std::string("plan ") + (plan_same ? "identical" : "differs") + ", compare " +
             (cmp_same ? "identical" : "differs") + ", DEM round trips " + std::to_string(exact) + "/" +
             std::to_string(round_trips);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"ground A* matches Dijkstra on 100 random terrains", optimality_oracle},
      {"energy model hand checks", energy_hand_checks},
      {"takeoff counter matches run-length oracle", takeoff_run_length},
      {"flight stage boundary table", stage_table},
      {"ridge crossing end to end", ridge_end_to_end},
      {"BAS monotone, incumbent kept, 3 evaluations per iteration", bas_guarantees},
      {"switch optimisation never costs energy", savings_direction},
      {"exhaustive grid is the oracle; BAS finds the bowl optimum", oracle_inequality},
      {"SOC ledger", soc_ledger},
      {"smoothing contract", smoothing_contract},
      {"determinism and DEM round trip", determinism_and_format},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s  %2zu  %s  (%s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
