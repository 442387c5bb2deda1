#include <doctest.h>

#include <algorithm>
#include <random>

#include "agplan/flight_search.hpp"
#include "agplan/ground_search.hpp"

using namespace agplan;

namespace {

TerrainGrid flat(int n = 20, double base = 0.0) {
  SynthSpec s;
  s.ncols = n;
  s.nrows = n;
  s.base = base;
  return synthesize_terrain(s);
}

TerrainGrid ridge() {
  SynthSpec s;
  s.kind = SynthKind::ridge;
  s.ncols = 48;
  s.nrows = 16;
  s.amplitude = 50.0;
  s.center_col = 24;
  return synthesize_terrain(s);
}

BatteryState airborne(double soc_ref = 0.15) {
  BatteryState b(BatterySettings{3.6e6, 3.6e6, soc_ref});
  b.mark_takeoff();
  return b;
}

}  // namespace

TEST_CASE("stage boundaries") {
  const FlightParams p = FlightParams::defaults_for(12.0);
  CHECK(p.c_escape == 24.0);
  CHECK(p.c_landing == 120.0);
  CHECK(p.epsilon == 6.0);
  CHECK(stage_for(0.0, p) == FlightStage::takeoff);
  CHECK(stage_for(std::nextafter(24.0, 0.0), p) == FlightStage::takeoff);
  CHECK(stage_for(24.0, p) == FlightStage::escape);
  CHECK(stage_for(std::nextafter(120.0, 0.0), p) == FlightStage::escape);
  CHECK(stage_for(120.0, p) == FlightStage::landing);
  CHECK(stage_for(1e9, p) == FlightStage::landing);
}

TEST_CASE("heuristic values per stage") {
  const FlightParams p = FlightParams::defaults_for(12.0);
  TrapEscapeState st;
  st.h2d0 = 200.0;
  st.h2d = 200.0;
  CHECK(trap_escape_heuristic(st, 40.0, 10.0, p, 0.0, 0.15) == 200.0 + p.epsilon);
  CHECK(st.stage == FlightStage::takeoff);
  st.h2d = 150.0;
  CHECK(trap_escape_heuristic(st, 40.0, 10.0, p, 0.0, 0.15) == 150.0);
  CHECK(st.stage == FlightStage::escape);
  st.h2d = 30.0;
  CHECK(trap_escape_heuristic(st, 40.0, 10.0, p, 0.0, 0.15) == 60.0);
  CHECK(st.stage == FlightStage::landing);
}

TEST_CASE("SOC rule forces the ground altitude in every stage") {
  const FlightParams p = FlightParams::defaults_for(12.0);
  for (double dh : {0.0, 50.0, 500.0}) {
    TrapEscapeState st;
    st.h2d0 = 600.0;
    st.h2d = 600.0 - dh;
    trap_escape_heuristic(st, 40.0, 10.0, p, 0.16, 0.15);
    CHECK(st.z_dummy == 10.0);
    CHECK(st.soc_override_active);
  }
  FlightParams off = p;
  off.soc_override = false;
  TrapEscapeState st;
  st.h2d0 = st.h2d = 100.0;
  trap_escape_heuristic(st, 40.0, 10.0, off, 0.9, 0.15);
  CHECK(st.z_dummy == 40.0 + p.epsilon);
}

TEST_CASE("h2d0 is the running maximum") {
  const FlightParams p = FlightParams::defaults_for(12.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 500.0);
  TrapEscapeState st;
  st.h2d0 = 100.0;
  double ref = 100.0;
  for (int i = 0; i < 1000; ++i) {
    st.h2d = d(rng);
    ref = std::max(ref, st.h2d);
    trap_escape_heuristic(st, 0.0, 0.0, p, 0.0, 0.15);
    CHECK(st.h2d0 == ref);
  }
}

TEST_CASE("flight mode routing") {
  const FlightParams p = FlightParams::defaults_for(12.0);
  CHECK(select_flight_mode(0.0, p) == FlightMode::direct);
  CHECK(select_flight_mode(p.near_goal_radius, p) == FlightMode::direct);
  CHECK(select_flight_mode(p.near_goal_radius + 12.0, p) == FlightMode::escape);
}

TEST_CASE("voxel columns sit on the terrain") {
  const TerrainGrid g = ridge();
  const FlightParams p = FlightParams::defaults_for(12.0);
  const VoxelSpace vs(g, p);
  for (GridIndex c : {GridIndex{0, 0}, GridIndex{20, 8}, GridIndex{24, 3}}) {
    CHECK(vs.position(vs.surface(c)).z == g.elevation_at(c));
    CHECK(vs.position(vs.surface(c)).x == c.col * 12.0);
  }
  CHECK(vs.z_ceiling() >= g.max_elevation());
}

TEST_CASE("direct flight: same cell is a zero-length path") {
  const TerrainGrid g = flat();
  const auto r = search_flight_direct(g, {3, 3}, {3, 3}, FlightParams::defaults_for(12.0), {}, airborne());
  CHECK(r.outcome == FlightOutcome::reached_goal);
  CHECK(r.path.size() == 1);
  CHECK(r.path_energy == 0.0);
}

TEST_CASE("direct flight: adjacent cells cost one fly segment") {
  const TerrainGrid g = flat();
  const EnergyParams e;
  const auto r = search_flight_direct(g, {3, 3}, {4, 3}, FlightParams::defaults_for(12.0), e, airborne());
  REQUIRE(r.outcome == FlightOutcome::reached_goal);
  CHECK(r.path.size() == 2);
  CHECK(r.path_energy == doctest::Approx(segment_energy(e, {12.0, 0.0, Mode::fly}, false)).epsilon(1e-12));
}

TEST_CASE("direct flight: straight corridor oracle") {
  const TerrainGrid g = flat(30);
  const EnergyParams e;
  FlightParams p = FlightParams::defaults_for(12.0);
  p.soc_override = false;
  const auto r = search_flight_direct(g, {2, 5}, {12, 5}, p, e, airborne());
  REQUIRE(r.outcome == FlightOutcome::reached_goal);
  CHECK(r.path.size() == 11);
  CHECK(r.path_energy == doctest::Approx(10.0 * segment_energy(e, {12.0, 0.0, Mode::fly}, false)).epsilon(1e-9));
}

TEST_CASE("direct flight: vertical climb in an open column") {
  const TerrainGrid g = flat();
  const FlightParams p = FlightParams::defaults_for(12.0);
  const auto r = search_flight_direct(g, {5, 5}, {5, 5}, p, {}, airborne(), 36.0);
  REQUIRE(r.outcome == FlightOutcome::reached_goal);
  CHECK(r.path.size() == 4);
  for (const FlightNode& n : r.path) CHECK(n.voxel.cell == GridIndex{5, 5});
}

TEST_CASE("escape flight crosses the ridge in stage order") {
  const TerrainGrid g = ridge();
  const MobilityLimits lim;
  const EnergyParams e;
  const auto ground = search_ground(g, {2, 8}, {45, 8}, lim, e, BatteryState{});
  REQUIRE(ground.switching_point.has_value());
  const FlightParams p = FlightParams::defaults_for(12.0);
  const BatteryState b = airborne();
  const auto r = search_flight_escape(g, *ground.switching_point, {45, 8}, ground.h2d_min, p, lim, e, b);
  REQUIRE(r.outcome == FlightOutcome::landed);
  REQUIRE(r.landing_point.has_value());
  CHECK(r.landing_point->col > 25);
  CHECK(feasible_node(g, *r.landing_point, lim));
  CHECK(r.path.back().position.z == g.elevation_at(*r.landing_point));
  std::vector<FlightStage> stages;
  for (const FlightNode& n : r.path) stages.push_back(n.stage);
  CHECK(std::is_sorted(stages.begin(), stages.end()));
  CHECK(stages.front() == FlightStage::takeoff);
  CHECK(stages.back() == FlightStage::landing);
  const VoxelSpace vs(g, p);
  for (const FlightNode& n : r.path) {
    CHECK(n.position.z >= g.elevation_at(n.voxel.cell));
    CHECK(n.position.z <= vs.z_ceiling());
  }
  CHECK(b.consumed() == 0.0);
}

TEST_CASE("soc_ref of zero lands right away") {
  const TerrainGrid g = flat();
  const FlightParams p = FlightParams::defaults_for(12.0);
  BatteryState b(BatterySettings{3.6e6, 3.6e6, 0.0});
  b.mark_takeoff();
  b.debit(1.0);
  const auto r = search_flight_escape(g, {2, 2}, {19, 19}, 0.0, p, {}, {}, b);
  REQUIRE(r.outcome == FlightOutcome::battery_limit_landing);
  REQUIRE(r.landing_point.has_value());
  CHECK(std::max(std::abs(r.landing_point->col - 2), std::abs(r.landing_point->row - 2)) <= 1);
}

TEST_CASE("parameter validation") {
  FlightParams p = FlightParams::defaults_for(12.0);
  p.c_escape = p.c_landing;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = FlightParams::defaults_for(12.0);
  p.z_ceiling = 10.0;
  CHECK_THROWS_AS(p.validate(ridge()), ConfigError);
}
