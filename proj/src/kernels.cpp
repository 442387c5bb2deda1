#include "agplan/kernels.hpp"

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agplan {

namespace {

void gradient_cell(const TerrainGrid& grid, std::size_t i, GradientField& out) {
  try {
    out.values[i] = grid.gradient_at(grid.unlinear(i));
    out.valid[i] = 1;
  } catch (const NodataError&) {
    out.values[i] = {};
    out.valid[i] = 0;
  }
}

}  // namespace

GradientField gradient_field(const TerrainGrid& grid) {
  GradientField out{std::vector<TerrainGradient>(grid.cell_count()),
                    std::vector<std::uint8_t>(grid.cell_count(), 0)};
  const auto n = static_cast<std::int64_t>(grid.cell_count());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) gradient_cell(grid, static_cast<std::size_t>(i), out);
  return out;
}

GradientField gradient_field_serial(const TerrainGrid& grid) {
  GradientField out{std::vector<TerrainGradient>(grid.cell_count()),
                    std::vector<std::uint8_t>(grid.cell_count(), 0)};
  for (std::size_t i = 0; i < grid.cell_count(); ++i) gradient_cell(grid, i, out);
  return out;
}

std::vector<std::uint8_t> feasibility_mask(const TerrainGrid& grid, const MobilityLimits& limits) {
  const GradientField field = gradient_field(grid);
  std::vector<std::uint8_t> mask(grid.cell_count(), 0);
  const auto n = static_cast<std::int64_t>(grid.cell_count());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    mask[u] = field.valid[u] && gradient_within(field.values[u], limits) ? 1 : 0;
  }
  return mask;
}

std::vector<std::uint8_t> feasibility_mask_serial(const TerrainGrid& grid,
                                                  const MobilityLimits& limits) {
  std::vector<std::uint8_t> mask(grid.cell_count(), 0);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    mask[i] = feasible_node(grid, grid.unlinear(i), limits) ? 1 : 0;
  }
  return mask;
}

int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace agplan
