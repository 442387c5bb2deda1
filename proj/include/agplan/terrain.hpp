#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agplan/errors.hpp"
#include "agplan/geometry.hpp"

namespace agplan {

struct GridIndex {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

/// Finite-difference slope of the surface at one cell. gx and gy are signed
/// rise/run along the local x (column) and y (row) axes, gz is the planar
/// slope magnitude sqrt(gx^2 + gy^2).
struct TerrainGradient {
  double gx = 0.0;
  double gy = 0.0;
  double gz = 0.0;
};

class TerrainError : public Error {
 public:
  using Error::Error;
};

class DemParseError : public TerrainError {
 public:
  using TerrainError::TerrainError;
};

class DemDimensionError : public TerrainError {
 public:
  using TerrainError::TerrainError;
};

class BoundsError : public TerrainError {
 public:
  using TerrainError::TerrainError;
};

class NodataError : public TerrainError {
 public:
  using TerrainError::TerrainError;
};

/// Immutable raster DEM.
///
/// Storage is row-major in file order: row 0 is the first data line of an
/// ASCII grid (the northern edge). The planner works in a local frame with
/// x = col * cell_size and y = row * cell_size, so +y points south; distances
/// and slopes are unaffected by that choice. world_x/world_y convert back to
/// the grid's own projected coordinates for export.
class TerrainGrid {
 public:
  TerrainGrid(int ncols, int nrows, double cell_size, std::vector<double> elevations,
              double origin_x = 0.0, double origin_y = 0.0,
              std::optional<double> nodata_value = std::nullopt);

  int ncols() const { return ncols_; }
  int nrows() const { return nrows_; }
  double cell_size() const { return cell_size_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  std::optional<double> nodata_value() const { return nodata_; }
  std::span<const double> elevations() const { return elevations_; }
  std::size_t cell_count() const { return elevations_.size(); }

  bool in_bounds(GridIndex idx) const {
    return idx.col >= 0 && idx.col < ncols_ && idx.row >= 0 && idx.row < nrows_;
  }
  std::size_t linear(GridIndex idx) const {
    return static_cast<std::size_t>(idx.row) * static_cast<std::size_t>(ncols_) +
           static_cast<std::size_t>(idx.col);
  }
  GridIndex unlinear(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(ncols_)),
            static_cast<int>(i / static_cast<std::size_t>(ncols_))};
  }

  /// True when the cell holds the nodata sentinel. Requires in_bounds.
  bool is_nodata(GridIndex idx) const;

  /// Stored elevation. Throws BoundsError or NodataError.
  double elevation_at(GridIndex idx) const;

  /// Central differences in the interior, one-sided at the edges.
  /// Throws NodataError when any stencil cell is nodata.
  TerrainGradient gradient_at(GridIndex idx) const;

  /// Cell centre on the terrain surface, local frame.
  Vec3 surface_point(GridIndex idx) const;

  /// Nearest cell to a local-frame horizontal position, clamped to the grid.
  GridIndex nearest_cell(double x, double y) const;

  double world_x(double local_x) const;
  double world_y(double local_y) const;
  double local_x(double world_x) const;
  double local_y(double world_y) const;

  /// Extremes over non-nodata cells.
  double min_elevation() const;
  double max_elevation() const;

 private:
  int ncols_;
  int nrows_;
  double cell_size_;
  double origin_x_;
  double origin_y_;
  std::optional<double> nodata_;
  std::vector<double> elevations_;
};

/// Parses an ESRI ASCII grid. Header keys are case-insensitive; xllcenter /
/// yllcenter are accepted and converted to corner form.
TerrainGrid load_dem(std::istream& in);
TerrainGrid load_dem_file(const std::string& path);

/// Writes an ASCII grid using shortest round-trip number formatting, so
/// load_dem(write_dem(g)) reproduces every value bit for bit.
void write_dem(std::ostream& out, const TerrainGrid& grid);
std::string write_dem_string(const TerrainGrid& grid);

enum class SynthKind { flat, ramp, ridge, ring, random_smooth };

std::string to_string(SynthKind kind);
SynthKind parse_synth_kind(const std::string& name);

struct SynthSpec {
  SynthKind kind = SynthKind::flat;
  int ncols = 20;
  int nrows = 20;
  double cell_size = 12.0;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  double base = 0.0;
  // ridge / ring geometry
  double flank_slope = 0.3;
  int flank_cells = 10;
  int crest_cells = 2;
  // Centre column of the ridge crest (ridge) or centre cell of the ring; -1
  // picks the grid centre.
  int center_col = -1;
  int center_row = -1;
  // ring: radius in cells of the flat basin inside the crest.
  int inner_radius = 3;
  // random-smooth: number of smoothing passes over white noise.
  int smoothing_passes = 4;
};

/// Deterministic synthetic terrain.
///
///   flat          constant `base`
///   ramp          base + amplitude * col / (ncols - 1) (rises along +x)
///   ridge         escarpment crossing the grid along y: flat at base, then a
///                 near flank of `flank_cells` cells rising at `flank_slope`,
///                 then a crest band of `crest_cells` at base + amplitude with
///                 cliff faces, then flat again
///   ring          the ridge profile revolved around a centre cell: basin of
///                 radius `inner_radius`, crest, outer flank, flat surround
///   random-smooth box-smoothed uniform noise rescaled to [base, base + amplitude]
TerrainGrid synthesize_terrain(const SynthSpec& spec);

}  // namespace agplan
