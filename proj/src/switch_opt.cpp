#include "agplan/switch_opt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "agplan/kernels.hpp"

namespace agplan {

BasParams BasParams::defaults_for(double cell_size) {
  BasParams p;
  p.antennae_distance = 4.0 * cell_size;
  p.step = 2.0 * cell_size;
  p.search_radius = 8.0 * cell_size;
  return p;
}

void BasParams::validate() const {
  if (!(antennae_distance > 0.0)) throw ConfigError("bas.d must be positive");
  if (!(step > 0.0)) throw ConfigError("bas.step must be positive");
  if (!(step_decay > 0.0) || step_decay > 1.0) throw ConfigError("bas.step_decay must be in (0, 1]");
  if (iterations < 0) throw ConfigError("bas.iterations must be >= 0");
  if (!(search_radius > 0.0)) throw ConfigError("bas.search_radius must be positive");
  if (!(alpha >= 0.0) || !(alpha_min >= 0.0)) throw ConfigError("bas.alpha must be >= 0");
}

double BasParams::alpha_for(double soc) const {
  if (alpha_schedule == AlphaSchedule::constant) return alpha;
  return alpha_min + (alpha - alpha_min) * std::clamp(soc, 0.0, 1.0);
}

// --- domain -----------------------------------------------------------------

SwitchDomain::SwitchDomain(const TerrainGrid& grid, GridIndex initial, double radius,
                           const std::vector<std::uint8_t>& drivable)
    : grid_(&grid), initial_(initial), radius_(radius), reachable_(grid.cell_count(), 0) {
  if (!grid.in_bounds(initial)) throw ContractError("switch domain centre out of bounds");
  if (!(radius > 0.0)) throw ContractError("switch domain radius must be positive");
  for (int r = 0; r < grid.nrows(); ++r)
    for (int c = 0; c < grid.ncols(); ++c)
      if (in_disk({c, r})) cells_.push_back({c, r});

  if (!drivable[grid.linear(initial)]) return;
  std::deque<GridIndex> queue{initial};
  reachable_[grid.linear(initial)] = 1;
  while (!queue.empty()) {
    const GridIndex cur = queue.front();
    queue.pop_front();
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const GridIndex nb{cur.col + dc, cur.row + dr};
        if (!grid.in_bounds(nb) || !in_disk(nb)) continue;
        const std::size_t ni = grid.linear(nb);
        if (reachable_[ni] || !drivable[ni]) continue;
        reachable_[ni] = 1;
        queue.push_back(nb);
      }
    }
  }
}

bool SwitchDomain::in_disk(GridIndex cell) const {
  const double cs = grid_->cell_size();
  return std::hypot((cell.col - initial_.col) * cs, (cell.row - initial_.row) * cs) <=
         radius_ + 1e-9;
}

bool SwitchDomain::reachable(GridIndex cell) const {
  return grid_->in_bounds(cell) && reachable_[grid_->linear(cell)] != 0;
}

Vec3 SwitchDomain::project(const Vec3& p) const {
  const Vec3 c = initial_point();
  double dx = p.x - c.x;
  double dy = p.y - c.y;
  const double r = std::hypot(dx, dy);
  if (r > radius_) {
    dx *= radius_ / r;
    dy *= radius_ / r;
  }
  const double cs = grid_->cell_size();
  const double x = std::clamp(c.x + dx, 0.0, (grid_->ncols() - 1) * cs);
  const double y = std::clamp(c.y + dy, 0.0, (grid_->nrows() - 1) * cs);
  const GridIndex cell = grid_->nearest_cell(x, y);
  const double z = grid_->is_nodata(cell) ? p.z : grid_->elevations()[grid_->linear(cell)];
  return {x, y, z};
}

GridIndex SwitchDomain::snap(const Vec3& p) const { return grid_->nearest_cell(p.x, p.y); }

// --- fitness ----------------------------------------------------------------

SwitchFitness switch_fitness(const SwitchDomain& domain, const MobilityLimits& limits,
                             const EnergyParams& energy, const SwitchContext& context,
                             const FitnessWeights& weights, const Vec3& candidate) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const TerrainGrid& grid = domain.grid();
  const GridIndex cell = domain.snap(candidate);
  if (!domain.reachable(cell) || !feasible_node(grid, cell, limits)) return {kInf, kInf, kInf};

  const TerrainGradient grad = grid.gradient_at(cell);
  const double r = weights.w_a * std::abs(grad.gx) + weights.w_b * std::abs(grad.gy) +
                   weights.w_c * grad.gz;
  const Vec3 at = grid.surface_point(cell);
  const Segment in{distance(context.pre, at), at.z - context.pre.z, context.pre_mode};
  const Segment out{distance(at, context.post), context.post.z - at.z, context.post_mode};
  const double e = segment_energy(energy, in, false) + transform_energy(energy) +
                   segment_energy(energy, out, false);
  return {e, r, e + weights.alpha * r};
}

FitnessFn make_switch_fitness(const SwitchDomain& domain, const MobilityLimits& limits,
                              const EnergyParams& energy, const SwitchContext& context,
                              const FitnessWeights& weights) {
  return [&domain, limits, energy, context, weights](const Vec3& p) {
    return switch_fitness(domain, limits, energy, context, weights, p);
  };
}

// --- BAS --------------------------------------------------------------------

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double n = norm(v);
    if (n > 0.0) return v / n;
  }
}

Antennae antennae_positions(const Vec3& centroid, const Vec3& b, double d) {
  const Vec3 half = b * (d / 2.0);
  return {centroid + half, centroid - half};
}

namespace {

double sign_of(double v) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return 0.0;  // ties and inf - inf
}

void offer(BasState& s, const Vec3& p, const SwitchFitness& f) {
  if (f.f < s.best.f) {
    s.best = f;
    s.best_point = p;
  }
}

}  // namespace

BasState bas_start(const SwitchDomain& domain, const FitnessFn& fitness, const BasParams& params) {
  BasState s;
  s.centroid = domain.project(domain.initial_point());
  s.best_point = s.centroid;
  s.best = fitness(s.centroid);
  s.evaluations = 1;
  s.step = params.step;
  s.history.push_back({0, s.centroid, s.best});
  return s;
}

BasState bas_step(BasState s, const BasParams& params, const SwitchDomain& domain,
                  const FitnessFn& fitness, std::mt19937_64& rng) {
  const Vec3 b = random_direction(rng);
  const Antennae ant = antennae_positions(s.centroid, b, params.antennae_distance);
  const Vec3 right = domain.project(ant.right);
  const Vec3 left = domain.project(ant.left);
  const SwitchFitness fr = fitness(right);
  const SwitchFitness fl = fitness(left);
  s.evaluations += 2;
  offer(s, right, fr);
  offer(s, left, fl);

  s.centroid = domain.project(s.centroid - b * (s.step * sign_of(fr.f - fl.f)));
  const SwitchFitness fc = fitness(s.centroid);
  s.evaluations += 1;
  offer(s, s.centroid, fc);

  ++s.iteration;
  s.history.push_back({s.iteration, s.centroid, fc});
  s.step *= params.step_decay;
  return s;
}

SwitchResult optimize_switch_point(const SwitchDomain& domain, const FitnessFn& fitness,
                                   const BasParams& params) {
  std::mt19937_64 rng(params.seed);
  BasState s = bas_start(domain, fitness, params);
  const SwitchFitness initial = s.best;
  for (int i = 0; i < params.iterations; ++i) s = bas_step(std::move(s), params, domain, fitness, rng);
  SwitchResult out;
  out.point = domain.snap(s.best_point);
  out.position = domain.grid().surface_point(out.point);
  out.fitness = s.best;
  out.initial_fitness = initial;
  out.trace = std::move(s.history);
  out.evaluations = s.evaluations;
  return out;
}

// --- baselines --------------------------------------------------------------

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::exhaustive_grid: return "exhaustive-grid";
    case BaselineMethod::random_search: return "random-search";
    case BaselineMethod::particle_swarm: return "particle-swarm";
  }
  return "exhaustive-grid";
}

std::vector<GridIndex> lattice_order(const SwitchDomain& domain) {
  const GridIndex c0 = domain.initial();
  const auto level = [&](GridIndex c) {
    const int dc = std::abs(c.col - c0.col);
    const int dr = std::abs(c.row - c0.row);
    for (int stride : {8, 4, 2}) {
      if (dc % stride == 0 && dr % stride == 0) return stride == 8 ? 0 : stride == 4 ? 1 : 2;
    }
    return 3;
  };
  std::vector<GridIndex> order = domain.cells();
  std::stable_sort(order.begin(), order.end(), [&](GridIndex a, GridIndex b) {
    const int la = level(a);
    const int lb = level(b);
    if (la != lb) return la < lb;
    const int da = (a.col - c0.col) * (a.col - c0.col) + (a.row - c0.row) * (a.row - c0.row);
    const int db = (b.col - c0.col) * (b.col - c0.col) + (b.row - c0.row) * (b.row - c0.row);
    if (da != db) return da < db;
    return a < b;
  });
  return order;
}

namespace {

struct Incumbent {
  Vec3 point;
  SwitchFitness fitness;
  void offer(const Vec3& p, const SwitchFitness& f) {
    if (f.f < fitness.f) {
      fitness = f;
      point = p;
    }
  }
};

Vec3 sample_disk(const SwitchDomain& domain, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double r = domain.radius() * std::sqrt(uni(rng));
  const double t = 2.0 * std::numbers::pi * uni(rng);
  const Vec3 c = domain.initial_point();
  return domain.project({c.x + r * std::cos(t), c.y + r * std::sin(t), c.z});
}

SwitchResult finish(const SwitchDomain& domain, const Incumbent& best, const SwitchFitness& initial,
                    std::size_t evaluations) {
  SwitchResult out;
  out.point = domain.snap(best.point);
  out.position = domain.grid().surface_point(out.point);
  out.fitness = best.fitness;
  out.initial_fitness = initial;
  out.evaluations = evaluations;
  return out;
}

}  // namespace

SwitchResult baseline_optimize(BaselineMethod method, std::size_t budget,
                               const SwitchDomain& domain, const FitnessFn& fitness,
                               std::uint64_t seed) {
  if (budget < 1) throw ContractError("optimiser budget must be >= 1");
  const Vec3 start = domain.project(domain.initial_point());
  const SwitchFitness initial = fitness(start);
  Incumbent best{start, initial};
  std::size_t used = 1;

  switch (method) {
    case BaselineMethod::exhaustive_grid: {
      const std::vector<GridIndex> order = lattice_order(domain);
      std::vector<Vec3> points;
      // order[0] is the initial cell, already evaluated.
      for (std::size_t i = 1; points.size() < budget - 1; ++i) {
        points.push_back(domain.grid().surface_point(order[i % order.size()]));
      }
      const auto values = map_parallel(points, fitness);
      std::vector<double> fs(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) fs[i] = values[i].f;
      const std::size_t k = argmin_index(fs);
      if (k != static_cast<std::size_t>(-1)) best.offer(points[k], values[k]);
      used += points.size();
      break;
    }
    case BaselineMethod::random_search: {
      std::mt19937_64 rng(seed);
      for (; used < budget; ++used) {
        const Vec3 p = sample_disk(domain, rng);
        best.offer(p, fitness(p));
      }
      break;
    }
    case BaselineMethod::particle_swarm: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      constexpr double kInertia = 0.7298;
      constexpr double kCognitive = 1.49618;
      constexpr double kSocial = 1.49618;
      const double vmax = domain.radius() / 2.0;
      const std::size_t swarm = std::min<std::size_t>(10, budget - 1);
      struct Particle {
        Vec3 x, v, best_x;
        double best_f;
      };
      std::vector<Particle> ps;
      for (std::size_t i = 0; i < swarm; ++i, ++used) {
        const Vec3 x = sample_disk(domain, rng);
        const Vec3 v{(2.0 * uni(rng) - 1.0) * vmax / 2.0, (2.0 * uni(rng) - 1.0) * vmax / 2.0, 0.0};
        const SwitchFitness f = fitness(x);
        best.offer(x, f);
        ps.push_back({x, v, x, f.f});
      }
      while (used < budget) {
        for (auto& p : ps) {
          if (used >= budget) break;
          const double r1 = uni(rng);
          const double r2 = uni(rng);
          Vec3 v = kInertia * p.v + kCognitive * r1 * (p.best_x - p.x) +
                   kSocial * r2 * (best.point - p.x);
          v.z = 0.0;
          const double speed = norm(v);
          if (speed > vmax) v = v * (vmax / speed);
          p.v = v;
          p.x = domain.project(p.x + v);
          const SwitchFitness f = fitness(p.x);
          ++used;
          if (f.f < p.best_f) {
            p.best_f = f.f;
            p.best_x = p.x;
          }
          best.offer(p.x, f);
        }
      }
      break;
    }
  }
  return finish(domain, best, initial, used);
}

}  // namespace agplan
