#include <doctest.h>

#include <cmath>

#include "agplan/ground_search.hpp"
#include "agplan/kernels.hpp"
#include "oracles.hpp"

using namespace agplan;

namespace {

TerrainGrid ramp(double slope, int n = 9, double cs = 12.0) {
  SynthSpec s;
  s.kind = SynthKind::ramp;
  s.ncols = n;
  s.nrows = n;
  s.cell_size = cs;
  s.amplitude = slope * cs * (n - 1);
  return synthesize_terrain(s);
}

TerrainGrid flat(int n = 20) {
  SynthSpec s;
  s.ncols = n;
  s.nrows = n;
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

}  // namespace

TEST_CASE("difficulty of a move") {
  const TerrainGrid f = flat();
  CHECK(dof_between(f, {5, 5}, {6, 5}, Heading{1, 0}, 0.4) == 0.0);
  CHECK(dof_between(f, {5, 5}, {6, 5}, std::nullopt, 0.4) == 0.0);
  CHECK(dof_between(f, {5, 5}, {4, 5}, Heading{1, 0}, 1.0) == doctest::Approx(1.0));
  CHECK(dof_between(f, {5, 5}, {5, 6}, Heading{1, 0}, 0.4) == doctest::Approx(0.2));
  CHECK(dof_between(ramp(1.0), {3, 3}, {4, 3}, Heading{1, 0}, 0.4) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dof_between(f, {5, 5}, {7, 5}, std::nullopt, 0.4), ContractError);
  CHECK_THROWS_AS(dof_between(f, {5, 5}, {5, 5}, std::nullopt, 0.4), ContractError);
}

TEST_CASE("takeoff counter") {
  const MobilityLimits lim;
  TakeoffDecision st;
  st = takeoff_decision_step(st, lim.m_index, lim);
  CHECK(st.count == 0);
  CHECK_FALSE(st.flag);
  for (int i = 0; i < 7; ++i) {
    st = takeoff_decision_step(st, lim.m_index + 0.1, lim);
    CHECK_FALSE(st.flag);
  }
  CHECK(st.count == 7);
  st = takeoff_decision_step(st, lim.m_index + 0.1, lim);
  CHECK(st.flag);
  CHECK(st.count == 8);

  TakeoffDecision six;
  for (int i = 0; i < 6; ++i) six = takeoff_decision_step(six, 1.0, lim);
  six = takeoff_decision_step(six, 0.0, lim);
  CHECK(six.count == 0);
  CHECK_FALSE(six.flag);
}

TEST_CASE("feasibility against the slope intervals") {
  MobilityLimits lim;
  CHECK(feasible_node(flat(), {3, 3}, lim));
  lim.gx_min = -1.0;
  lim.gx_max = 1.0;
  lim.gz_max = 0.5;
  CHECK_FALSE(feasible_node(ramp(0.7), {3, 3}, lim));
  lim.gz_max = 0.8;
  CHECK(feasible_node(ramp(0.7), {3, 3}, lim));
  CHECK_FALSE(gradient_within({0.0, 0.0, 0.9}, lim));
}

TEST_CASE("limits validation") {
  MobilityLimits lim;
  lim.gx_min = 1.0;
  CHECK_THROWS_AS(lim.validate(), ConfigError);
  lim = {};
  lim.count_threshold = -1;
  CHECK_THROWS_AS(lim.validate(), ConfigError);
}

TEST_CASE("flat diagonal route") {
  const TerrainGrid g = flat();
  const EnergyParams e;
  const auto r = search_ground(g, {1, 1}, {18, 18}, {}, e, BatteryState{});
  CHECK(r.outcome == GroundOutcome::reached_goal);
  CHECK(r.partial_path.size() == 18);
  const double step = 100.0 + drive_energy_per_meter(e) * 12.0 * std::sqrt(2.0);
  CHECK(r.path_energy == doctest::Approx(17.0 * step).epsilon(1e-12));
  CHECK(r.h2d_min == 0.0);
  CHECK_FALSE(r.switching_point.has_value());
}

TEST_CASE("start equals goal") {
  const auto r = search_ground(flat(), {4, 4}, {4, 4}, {}, {}, BatteryState{});
  CHECK(r.outcome == GroundOutcome::reached_goal);
  CHECK(r.partial_path == std::vector<GridIndex>{{4, 4}});
  CHECK(r.path_energy == 0.0);
}

TEST_CASE("energy-optimal on random terrain (Dijkstra oracle, many goals)") {
  const EnergyParams e;
  const MobilityLimits lim;
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const TerrainGrid g = oracle::random_terrain(seed);
    const auto mask = feasibility_mask(g, lim);
    const auto first = std::find(mask.begin(), mask.end(), 1);
    REQUIRE(first != mask.end());
    const GridIndex start = g.unlinear(static_cast<std::size_t>(first - mask.begin()));
    const auto ref = oracle::dijkstra(g, start, mask, e);
    for (std::size_t i = 0; i < ref.dist.size(); i += 37) {
      if (!mask[i]) continue;
      const auto r = search_ground(g, start, g.unlinear(i), lim, e, BatteryState{}, {.detect_takeoff = false});
      if (std::isfinite(ref.dist[i])) {
        CHECK(r.outcome == GroundOutcome::reached_goal);
        CHECK(r.path_energy == ref.dist[i]);
        for (std::size_t k = 1; k < r.partial_path.size(); ++k) {
          const GridIndex a = r.partial_path[k - 1];
          const GridIndex b = r.partial_path[k];
          CHECK(std::max(std::abs(a.col - b.col), std::abs(a.row - b.row)) == 1);
          CHECK(mask[g.linear(b)]);
        }
      } else {
        CHECK(r.outcome == GroundOutcome::exhausted);
      }
    }
  }
}

TEST_CASE("ridge flank raises the takeoff flag") {
  const TerrainGrid g = ridge();
  const MobilityLimits lim;
  const auto r = search_ground(g, {2, 8}, {45, 8}, lim, {}, BatteryState{});
  REQUIRE(r.outcome == GroundOutcome::takeoff_required);
  REQUIRE(r.switching_point.has_value());
  CHECK(r.partial_path.back() == *r.switching_point);
  CHECK(r.partial_path.front() == GridIndex{2, 8});
  CHECK(r.switching_point->col > 14);
  CHECK(r.switching_point->col < 24);
  CHECK(r.decision.flag);
  CHECK(r.decision.count == lim.count_threshold + 1);
  CHECK(feasible_node(g, *r.switching_point, lim));
  CHECK(r.h2d_min <= manhattan_m(g, *r.switching_point, {45, 8}));

  const auto off = search_ground(g, {2, 8}, {45, 8}, lim, {}, BatteryState{}, {.detect_takeoff = false});
  CHECK(off.outcome == GroundOutcome::exhausted);
}

TEST_CASE("contract and battery limits") {
  const TerrainGrid g = ridge();
  CHECK_THROWS_AS(search_ground(g, {-1, 0}, {3, 3}, {}, {}, BatteryState{}), ContractError);
  CHECK_THROWS_AS(search_ground(g, {2, 8}, {23, 8}, {}, {}, BatteryState{}), ContractError);
  const BatteryState tiny(BatterySettings{1000.0, 1000.0, 0.15});
  const auto r = search_ground(flat(), {1, 1}, {18, 18}, {}, {}, tiny);
  CHECK(r.outcome == GroundOutcome::exhausted);
  CHECK(r.battery_limited);
  CHECK(r.path_energy <= 1000.0);
  CHECK_FALSE(search_ground(flat(), {1, 1}, {18, 18}, {}, {}, BatteryState{}).battery_limited);
}
