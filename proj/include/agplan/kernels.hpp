#pragma once

// Data-parallel kernels. Every OpenMP kernel has a *_serial twin that is the
// reference the tests compare against; results are identical element for
// element because each output slot is written by exactly one iteration.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "agplan/mobility.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

struct GradientField {
  std::vector<TerrainGradient> values;
  std::vector<std::uint8_t> valid;  // 0 where the stencil touches nodata
};

GradientField gradient_field(const TerrainGrid& grid);
GradientField gradient_field_serial(const TerrainGrid& grid);

/// 1 where feasible_node holds.
std::vector<std::uint8_t> feasibility_mask(const TerrainGrid& grid, const MobilityLimits& limits);
std::vector<std::uint8_t> feasibility_mask_serial(const TerrainGrid& grid,
                                                  const MobilityLimits& limits);

/// Applies `fn` to every element of `inputs`; `fn` must be safe to call
/// concurrently.
template <typename T, typename Fn>
auto map_parallel(const std::vector<T>& inputs, Fn&& fn) {
  using R = decltype(fn(inputs.front()));
  std::vector<R> out(inputs.size());
  const auto n = static_cast<std::int64_t>(inputs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(inputs[static_cast<std::size_t>(i)]);
  return out;
}

template <typename T, typename Fn>
auto map_serial(const std::vector<T>& inputs, Fn&& fn) {
  using R = decltype(fn(inputs.front()));
  std::vector<R> out;
  out.reserve(inputs.size());
  for (const auto& v : inputs) out.push_back(fn(v));
  return out;
}

/// Index of the smallest value, lowest index on ties; npos when empty.
inline std::size_t argmin_index(const std::vector<double>& values) {
  std::size_t best = static_cast<std::size_t>(-1);
  double best_v = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (best == static_cast<std::size_t>(-1) || values[i] < best_v) {
      best = i;
      best_v = values[i];
    }
  }
  return best;
}

/// Thread count OpenMP would use for a parallel region (1 without OpenMP).
int hardware_threads();

}  // namespace agplan
