#pragma once

// Reference implementations the tests compare the library against. They
// share only the edge-cost and feasibility primitives with the code under
// test, never its search or bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "agplan/energy.hpp"
#include "agplan/ground_search.hpp"
#include "agplan/kernels.hpp"
#include "agplan/terrain.hpp"

namespace oracle {

// Hand-computed before the build from the platform constants
// (m = 39.5 kg, r = 0.4191 m, n = 6, rho = 1.2, g = 9.81, eta = 0.58,
// v_fly = 2 m/s, v_drive = 1 m/s, mu = 0.06, cd = 1.5, A = 0.6 / 0.05 m^2):
//   hover, 12 m level flight: t = 6 s, P = sqrt((mg)^3 / (2 rho n pi r^2)) / eta
//   drive move, 12 m level:   mu m g d + cd rho A v^2 d / 2
//   fly drag, 12 m level:     cd rho A v^2 d / 2
inline constexpr double kHoverFly12 = 27992.943533404569413403722785;
inline constexpr double kMoveDrive12 = 279.5364;
inline constexpr double kDragFly12 = 25.92;
inline constexpr double kStandby = 100.0;

struct DijkstraResult {
  std::vector<double> dist;
};

/// Plain Dijkstra over drivable cells, 8-connected, drive segment energies.
inline DijkstraResult dijkstra(const agplan::TerrainGrid& grid, agplan::GridIndex start,
                               const std::vector<std::uint8_t>& drivable,
                               const agplan::EnergyParams& energy) {
  const std::size_t n = grid.cell_count();
  DijkstraResult r;
  r.dist.assign(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  r.dist[grid.linear(start)] = 0.0;
  pq.push({0.0, grid.linear(start)});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d != r.dist[u]) continue;
    const agplan::GridIndex cu = grid.unlinear(u);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const agplan::GridIndex cv{cu.col + dc, cu.row + dr};
        if (!grid.in_bounds(cv)) continue;
        const std::size_t v = grid.linear(cv);
        if (!drivable[v]) continue;
        const double w =
            agplan::segment_energy(energy, agplan::drive_segment(grid, cu, cv), false);
        if (d + w < r.dist[v]) {
          r.dist[v] = d + w;
          pq.push({r.dist[v], v});
        }
      }
    }
  }
  return r;
}

/// Flag of the takeoff counter after a DOF sequence: the trailing run of
/// values above m_index is longer than the threshold.
inline bool run_length_flag(const std::vector<double>& dofs, double m_index, int threshold) {
  int run = 0;
  for (double d : dofs) run = d > m_index ? run + 1 : 0;
  return run > threshold;
}

inline int trailing_run(const std::vector<double>& dofs, double m_index) {
  int run = 0;
  for (double d : dofs) run = d > m_index ? run + 1 : 0;
  return run;
}

/// Random rough 20 x 20 terrain with a mix of drivable and blocked cells.
inline agplan::TerrainGrid random_terrain(std::uint64_t seed, int n = 20) {
  agplan::SynthSpec s;
  s.kind = agplan::SynthKind::random_smooth;
  s.ncols = n;
  s.nrows = n;
  s.amplitude = 45.0;
  s.smoothing_passes = 2;
  s.seed = seed;
  return agplan::synthesize_terrain(s);
}

/// Convex hull membership by support functions: for every probe direction
/// the sample may not lie beyond the furthest control point.
inline bool within_hull(const agplan::Vec3& p, const std::vector<agplan::Vec3>& controls,
                        const std::vector<agplan::Vec3>& directions, double tol) {
  for (const agplan::Vec3& u : directions) {
    double best = -std::numeric_limits<double>::infinity();
    for (const agplan::Vec3& c : controls) best = std::max(best, u.x * c.x + u.y * c.y + u.z * c.z);
    if (u.x * p.x + u.y * p.y + u.z * p.z > best + tol) return false;
  }
  return true;
}

inline std::vector<agplan::Vec3> probe_directions(int count, std::uint64_t seed) {
  std::vector<agplan::Vec3> out{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  while (static_cast<int>(out.size()) < count) {
    agplan::Vec3 v{g(rng), g(rng), g(rng)};
    const double len = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (len < 1e-12) continue;
    out.push_back({v.x / len, v.y / len, v.z / len});
  }
  return out;
}

}  // namespace oracle
