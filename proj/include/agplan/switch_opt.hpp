#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "agplan/energy.hpp"
#include "agplan/geometry.hpp"
#include "agplan/mobility.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

enum class AlphaSchedule { constant, linear };

/// Beetle antennae search settings. Lengths in metres.
struct BasParams {
  double antennae_distance = 48.0;
  double step = 24.0;
  double step_decay = 0.95;
  int iterations = 50;
  double alpha = 500.0;  // J per unit of R
  double w_a = 1.0;
  double w_b = 1.0;
  double w_c = 2.0;
  std::uint64_t seed = 1;
  double search_radius = 96.0;
  // linear: alpha grows from alpha_min at soc 0 to alpha at soc 1, so a
  // well-charged robot weighs terrain quality more.
  AlphaSchedule alpha_schedule = AlphaSchedule::constant;
  double alpha_min = 0.0;

  static BasParams defaults_for(double cell_size);
  void validate() const;
  double alpha_for(double soc) const;
};

struct SwitchFitness {
  double e_term = 0.0;
  double r_term = 0.0;
  double f = 0.0;
};

using FitnessFn = std::function<SwitchFitness(const Vec3&)>;

/// The search disk around an initial switching point. Candidates are clamped
/// into the disk and the grid, then dropped onto the terrain surface.
/// Reachability marks the cells connected to the initial cell through
/// drivable cells without leaving the disk.
class SwitchDomain {
 public:
  SwitchDomain(const TerrainGrid& grid, GridIndex initial, double radius,
               const std::vector<std::uint8_t>& drivable);

  const TerrainGrid& grid() const { return *grid_; }
  GridIndex initial() const { return initial_; }
  Vec3 initial_point() const { return grid_->surface_point(initial_); }
  double radius() const { return radius_; }

  Vec3 project(const Vec3& p) const;
  GridIndex snap(const Vec3& p) const;
  bool in_disk(GridIndex cell) const;
  bool reachable(GridIndex cell) const;
  /// In-disk cells, row-major.
  const std::vector<GridIndex>& cells() const { return cells_; }

 private:
  const TerrainGrid* grid_;
  GridIndex initial_;
  double radius_;
  std::vector<std::uint8_t> reachable_;
  std::vector<GridIndex> cells_;
};

/// Local plan around a switching point: the last committed node before the
/// switch and a node the plan heads for after it.
struct SwitchContext {
  Vec3 pre;
  Mode pre_mode = Mode::drive;
  Vec3 post;
  Mode post_mode = Mode::fly;
};

struct FitnessWeights {
  double alpha = 500.0;
  double w_a = 1.0;
  double w_b = 1.0;
  double w_c = 2.0;
};

/// F = E + alpha * R at the candidate's nearest cell, where
/// R = w_a |gx| + w_b |gy| + w_c gz and E is the energy of the rerouted local
/// plan: pre -> candidate in pre_mode, one transform, candidate -> post in
/// post_mode. Cells that are not drivable or not reachable score +inf.
SwitchFitness switch_fitness(const SwitchDomain& domain, const MobilityLimits& limits,
                             const EnergyParams& energy, const SwitchContext& context,
                             const FitnessWeights& weights, const Vec3& candidate);

FitnessFn make_switch_fitness(const SwitchDomain& domain, const MobilityLimits& limits,
                              const EnergyParams& energy, const SwitchContext& context,
                              const FitnessWeights& weights);

/// Wraps a fitness function and counts calls; safe under OpenMP.
class CountingFitness {
 public:
  explicit CountingFitness(FitnessFn inner) : inner_(std::move(inner)) {}
  CountingFitness(const CountingFitness&) = delete;
  CountingFitness& operator=(const CountingFitness&) = delete;

  SwitchFitness operator()(const Vec3& p) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_(p);
  }
  std::size_t count() const { return count_.load(); }
  FitnessFn as_function() const {
    return [this](const Vec3& p) { return (*this)(p); };
  }

 private:
  FitnessFn inner_;
  mutable std::atomic<std::size_t> count_{0};
};

/// Isotropic unit vector from normalised Gaussian samples; resamples the
/// (measure-zero) all-zero draw.
Vec3 random_direction(std::mt19937_64& rng);

struct Antennae {
  Vec3 right;
  Vec3 left;
};

Antennae antennae_positions(const Vec3& centroid, const Vec3& b, double d);

struct BasTraceEntry {
  int iteration = 0;
  Vec3 point;
  SwitchFitness fitness;
};

struct BasState {
  Vec3 centroid;
  Vec3 best_point;
  SwitchFitness best;
  double step = 0.0;
  int iteration = 0;
  std::size_t evaluations = 0;
  std::vector<BasTraceEntry> history;
};

/// Starts at the domain's initial point and evaluates it as the incumbent.
BasState bas_start(const SwitchDomain& domain, const FitnessFn& fitness, const BasParams& params);

/// One iteration: random direction, both antennae evaluated, centroid moved
/// by -step * b * sign(F(right) - F(left)) (sign(0) = 0), projected, clamped
/// and evaluated. The best of all three evaluations may replace the
/// incumbent. Exactly three fitness calls.
BasState bas_step(BasState state, const BasParams& params, const SwitchDomain& domain,
                  const FitnessFn& fitness, std::mt19937_64& rng);

struct SwitchResult {
  GridIndex point;
  Vec3 position;
  SwitchFitness fitness;
  SwitchFitness initial_fitness;
  std::vector<BasTraceEntry> trace;
  std::size_t evaluations = 0;
};

/// BAS from the domain's initial point for params.iterations steps; returns
/// the best evaluated point snapped to its cell. Uses 1 + 3 * iterations
/// evaluations.
SwitchResult optimize_switch_point(const SwitchDomain& domain, const FitnessFn& fitness,
                                   const BasParams& params);

enum class BaselineMethod { exhaustive_grid, random_search, particle_swarm };

std::string to_string(BaselineMethod method);

/// Comparison optimisers. Each consumes exactly `budget` evaluations and the
/// first one is always the initial point.
///
///   exhaustive-grid  in-disk cells, coarse lattice first (stride 8, 4, 2, 1
///                    around the initial cell), then by distance; evaluated
///                    in parallel; the order restarts if budget exceeds the
///                    cell count
///   random-search    uniform samples in the disk
///   particle-swarm   global-best PSO in the horizontal plane
SwitchResult baseline_optimize(BaselineMethod method, std::size_t budget,
                               const SwitchDomain& domain, const FitnessFn& fitness,
                               std::uint64_t seed);

/// Exhaustive-grid visiting order (without repetition).
std::vector<GridIndex> lattice_order(const SwitchDomain& domain);

}  // namespace agplan
