#include "agplan/terrain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "agplan/numfmt.hpp"

namespace agplan {

TerrainGrid::TerrainGrid(int ncols, int nrows, double cell_size, std::vector<double> elevations,
                         double origin_x, double origin_y, std::optional<double> nodata_value)
    : ncols_(ncols),
      nrows_(nrows),
      cell_size_(cell_size),
      origin_x_(origin_x),
      origin_y_(origin_y),
      nodata_(nodata_value),
      elevations_(std::move(elevations)) {
  if (ncols_ < 2 || nrows_ < 2) {
    throw DemDimensionError("terrain grid must be at least 2x2, got " + std::to_string(ncols_) +
                            "x" + std::to_string(nrows_));
  }
  if (!(cell_size_ > 0.0) || !std::isfinite(cell_size_)) {
    throw TerrainError("cell_size must be positive and finite");
  }
  if (elevations_.size() != static_cast<std::size_t>(ncols_) * static_cast<std::size_t>(nrows_)) {
    throw DemDimensionError("elevation count " + std::to_string(elevations_.size()) +
                            " does not match " + std::to_string(ncols_) + "x" +
                            std::to_string(nrows_));
  }
  for (std::size_t i = 0; i < elevations_.size(); ++i) {
    const double e = elevations_[i];
    if (nodata_ && e == *nodata_) continue;
    if (!std::isfinite(e)) {
      const auto idx = unlinear(i);
      throw TerrainError("non-finite elevation at row " + std::to_string(idx.row) + ", col " +
                         std::to_string(idx.col));
    }
  }
}

bool TerrainGrid::is_nodata(GridIndex idx) const {
  return nodata_.has_value() && elevations_[linear(idx)] == *nodata_;
}

double TerrainGrid::elevation_at(GridIndex idx) const {
  if (!in_bounds(idx)) {
    throw BoundsError("cell (col=" + std::to_string(idx.col) + ", row=" + std::to_string(idx.row) +
                      ") outside " + std::to_string(ncols_) + "x" + std::to_string(nrows_) +
                      " grid");
  }
  if (is_nodata(idx)) {
    throw NodataError("cell (col=" + std::to_string(idx.col) + ", row=" +
                      std::to_string(idx.row) + ") is nodata");
  }
  return elevations_[linear(idx)];
}

namespace {

// Derivative along one axis at `i` of a line of `n` samples fetched by `at`.
template <typename At>
double axis_slope(int i, int n, double h, At at) {
  if (i == 0) return (at(1) - at(0)) / h;
  if (i == n - 1) return (at(n - 1) - at(n - 2)) / h;
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

}  // namespace

TerrainGradient TerrainGrid::gradient_at(GridIndex idx) const {
  const double h = cell_size_;
  const double gx = axis_slope(idx.col, ncols_, h, [&](int c) {
    return elevation_at({c, idx.row});
  });
  const double gy = axis_slope(idx.row, nrows_, h, [&](int r) {
    return elevation_at({idx.col, r});
  });
  return {gx, gy, std::sqrt(gx * gx + gy * gy)};
}

Vec3 TerrainGrid::surface_point(GridIndex idx) const {
  return {idx.col * cell_size_, idx.row * cell_size_, elevation_at(idx)};
}

GridIndex TerrainGrid::nearest_cell(double x, double y) const {
  const auto clamp_axis = [](double v, int n) {
    const double r = std::round(v);
    if (!(r >= 0.0)) return 0;
    if (r > n - 1) return n - 1;
    return static_cast<int>(r);
  };
  return {clamp_axis(x / cell_size_, ncols_), clamp_axis(y / cell_size_, nrows_)};
}

double TerrainGrid::world_x(double lx) const { return origin_x_ + 0.5 * cell_size_ + lx; }
double TerrainGrid::world_y(double ly) const {
  return origin_y_ + (nrows_ - 0.5) * cell_size_ - ly;
}
double TerrainGrid::local_x(double wx) const { return wx - origin_x_ - 0.5 * cell_size_; }
double TerrainGrid::local_y(double wy) const {
  return origin_y_ + (nrows_ - 0.5) * cell_size_ - wy;
}

double TerrainGrid::min_elevation() const {
  double m = std::numeric_limits<double>::infinity();
  for (double e : elevations_) {
    if (nodata_ && e == *nodata_) continue;
    m = std::min(m, e);
  }
  return m;
}

double TerrainGrid::max_elevation() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double e : elevations_) {
    if (nodata_ && e == *nodata_) continue;
    m = std::max(m, e);
  }
  return m;
}

// --- ASCII grid I/O ---------------------------------------------------------

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_header_key(const std::string& token) {
  if (token.empty()) return false;
  const unsigned char c = static_cast<unsigned char>(token.front());
  return std::isalpha(c) && lower(token) != "nan" && lower(token) != "inf";
}

}  // namespace

TerrainGrid load_dem(std::istream& in) {
  std::map<std::string, std::string> header;
  std::string line;
  std::vector<std::string> data_lines;
  bool in_header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank line
    if (in_header && is_header_key(first)) {
      std::string value;
      if (!(ls >> value)) throw DemParseError("header key '" + first + "' has no value");
      std::string extra;
      if (ls >> extra) throw DemParseError("header key '" + first + "' has trailing tokens");
      const std::string key = lower(first);
      if (header.count(key)) throw DemParseError("header key '" + first + "' repeated");
      header[key] = value;
      continue;
    }
    in_header = false;
    data_lines.push_back(line);
  }

  const auto require = [&](const std::string& key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw DemParseError("missing header key '" + key + "'");
    return it->second;
  };
  const auto as_int = [](const std::string& key, const std::string& v) {
    long long out = 0;
    if (!parse_int(v, out) || out < 2 || out > (1LL << 24)) {
      throw DemParseError("header key '" + key + "' has invalid value '" + v + "'");
    }
    return static_cast<int>(out);
  };
  const auto as_double = [](const std::string& key, const std::string& v) {
    double out = 0.0;
    if (!parse_double(v, out) || !std::isfinite(out)) {
      throw DemParseError("header key '" + key + "' has invalid value '" + v + "'");
    }
    return out;
  };

  static const char* const kKnown[] = {"ncols",     "nrows",     "xllcorner",   "yllcorner",
                                       "xllcenter", "yllcenter", "cellsize", "nodata_value"};
  for (const auto& [key, value] : header) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      throw DemParseError("unknown header key '" + key + "'");
    }
  }

  const int ncols = as_int("ncols", require("ncols"));
  const int nrows = as_int("nrows", require("nrows"));
  const double cellsize = as_double("cellsize", require("cellsize"));
  if (!(cellsize > 0.0)) throw DemParseError("header key 'cellsize' must be positive");

  double ox = 0.0;
  double oy = 0.0;
  if (header.count("xllcorner")) {
    ox = as_double("xllcorner", header["xllcorner"]);
  } else if (header.count("xllcenter")) {
    ox = as_double("xllcenter", header["xllcenter"]) - 0.5 * cellsize;
  } else {
    throw DemParseError("missing header key 'xllcorner'");
  }
  if (header.count("yllcorner")) {
    oy = as_double("yllcorner", header["yllcorner"]);
  } else if (header.count("yllcenter")) {
    oy = as_double("yllcenter", header["yllcenter"]) - 0.5 * cellsize;
  } else {
    throw DemParseError("missing header key 'yllcorner'");
  }
  std::optional<double> nodata;
  if (header.count("nodata_value")) nodata = as_double("nodata_value", header["nodata_value"]);

  if (data_lines.size() != static_cast<std::size_t>(nrows)) {
    throw DemDimensionError("header declares nrows=" + std::to_string(nrows) + " but found " +
                            std::to_string(data_lines.size()) + " data rows");
  }
  std::vector<double> elevations;
  elevations.reserve(static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows));
  for (int r = 0; r < nrows; ++r) {
    std::istringstream ls(data_lines[static_cast<std::size_t>(r)]);
    std::string tok;
    int c = 0;
    while (ls >> tok) {
      if (c >= ncols) {
        throw DemDimensionError("row " + std::to_string(r) + " has more than ncols=" +
                                std::to_string(ncols) + " values");
      }
      double v = 0.0;
      if (!parse_double(tok, v) || (!std::isfinite(v) && !(nodata && v == *nodata))) {
        throw DemParseError("non-numeric cell '" + tok + "' at row " + std::to_string(r) +
                            ", col " + std::to_string(c));
      }
      elevations.push_back(v);
      ++c;
    }
    if (c != ncols) {
      throw DemDimensionError("row " + std::to_string(r) + " has " + std::to_string(c) +
                              " values, header declares ncols=" + std::to_string(ncols));
    }
  }
  return TerrainGrid(ncols, nrows, cellsize, std::move(elevations), ox, oy, nodata);
}

TerrainGrid load_dem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TerrainError("cannot open DEM file '" + path + "'");
  return load_dem(in);
}

void write_dem(std::ostream& out, const TerrainGrid& grid) {
  out << "ncols " << grid.ncols() << '\n';
  out << "nrows " << grid.nrows() << '\n';
  out << "xllcorner " << format_double(grid.origin_x()) << '\n';
  out << "yllcorner " << format_double(grid.origin_y()) << '\n';
  out << "cellsize " << format_double(grid.cell_size()) << '\n';
  if (grid.nodata_value()) out << "NODATA_value " << format_double(*grid.nodata_value()) << '\n';
  const auto elev = grid.elevations();
  for (int r = 0; r < grid.nrows(); ++r) {
    for (int c = 0; c < grid.ncols(); ++c) {
      if (c) out << ' ';
      out << format_double(elev[grid.linear({c, r})]);
    }
    out << '\n';
  }
}

std::string write_dem_string(const TerrainGrid& grid) {
  std::ostringstream os;
  write_dem(os, grid);
  return os.str();
}

// --- synthesis --------------------------------------------------------------

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::flat: return "flat";
    case SynthKind::ramp: return "ramp";
    case SynthKind::ridge: return "ridge";
    case SynthKind::ring: return "ring";
    case SynthKind::random_smooth: return "random-smooth";
  }
  return "flat";
}

SynthKind parse_synth_kind(const std::string& name) {
  const std::string n = lower(name);
  if (n == "flat") return SynthKind::flat;
  if (n == "ramp") return SynthKind::ramp;
  if (n == "ridge") return SynthKind::ridge;
  if (n == "ring") return SynthKind::ring;
  if (n == "random-smooth" || n == "random_smooth") return SynthKind::random_smooth;
  throw ContractError("unknown terrain kind '" + name + "'");
}

namespace {

// Elevation above base of the escarpment profile at signed distance `d`
// (cells) from the first crest cell; negative d lies on the flank side.
double escarpment(const SynthSpec& s, double d) {
  if (d >= 0.0 && d < s.crest_cells) return s.amplitude;
  if (d < 0.0 && d >= -s.flank_cells) {
    const double steps = s.flank_cells + d + 1.0;  // 1 at the flank foot
    return std::min(s.amplitude, s.flank_slope * s.cell_size * steps);
  }
  return 0.0;
}

}  // namespace

TerrainGrid synthesize_terrain(const SynthSpec& s) {
  if (s.ncols < 2 || s.nrows < 2) throw ContractError("synthetic terrain needs at least 2x2 cells");
  if (!(s.cell_size > 0.0)) throw ContractError("synthetic terrain needs positive cell_size");
  if (!(s.amplitude >= 0.0)) throw ContractError("synthetic terrain needs amplitude >= 0");
  if (s.flank_cells < 0 || s.crest_cells < 1 || s.flank_slope < 0.0 || s.inner_radius < 0) {
    throw ContractError("invalid ridge/ring geometry");
  }

  const auto n = static_cast<std::size_t>(s.ncols) * static_cast<std::size_t>(s.nrows);
  std::vector<double> e(n, s.base);
  const auto at = [&](int c, int r) -> double& {
    return e[static_cast<std::size_t>(r) * static_cast<std::size_t>(s.ncols) +
             static_cast<std::size_t>(c)];
  };

  switch (s.kind) {
    case SynthKind::flat:
      break;
    case SynthKind::ramp:
      for (int r = 0; r < s.nrows; ++r)
        for (int c = 0; c < s.ncols; ++c)
          at(c, r) = s.base + s.amplitude * c / (s.ncols - 1);
      break;
    case SynthKind::ridge: {
      const int crest = s.center_col >= 0 ? s.center_col : s.ncols / 2;
      for (int r = 0; r < s.nrows; ++r)
        for (int c = 0; c < s.ncols; ++c)
          at(c, r) = s.base + escarpment(s, static_cast<double>(c - crest));
      break;
    }
    case SynthKind::ring: {
      const int cc = s.center_col >= 0 ? s.center_col : s.ncols / 2;
      const int cr = s.center_row >= 0 ? s.center_row : s.nrows / 2;
      for (int r = 0; r < s.nrows; ++r) {
        for (int c = 0; c < s.ncols; ++c) {
          const double rho = std::hypot(c - cc, r - cr);
          // Crest starts just outside the basin; the flank lies further out.
          const double d = (s.inner_radius + s.crest_cells) - rho;
          double h = 0.0;
          if (rho > s.inner_radius && rho <= s.inner_radius + s.crest_cells) {
            h = s.amplitude;
          } else if (d < 0.0 && d >= -s.flank_cells) {
            h = std::min(s.amplitude, s.flank_slope * s.cell_size * (s.flank_cells + d + 1.0));
          }
          at(c, r) = s.base + h;
        }
      }
      break;
    }
    case SynthKind::random_smooth: {
      std::mt19937_64 rng(s.seed);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::vector<double> noise(n);
      for (auto& v : noise) v = uni(rng);
      std::vector<double> tmp(n);
      for (int pass = 0; pass < s.smoothing_passes; ++pass) {
        for (int r = 0; r < s.nrows; ++r) {
          for (int c = 0; c < s.ncols; ++c) {
            double sum = 0.0;
            int cnt = 0;
            for (int dr = -1; dr <= 1; ++dr) {
              for (int dc = -1; dc <= 1; ++dc) {
                const int rr = std::clamp(r + dr, 0, s.nrows - 1);
                const int cc = std::clamp(c + dc, 0, s.ncols - 1);
                sum += noise[static_cast<std::size_t>(rr) * static_cast<std::size_t>(s.ncols) +
                             static_cast<std::size_t>(cc)];
                ++cnt;
              }
            }
            tmp[static_cast<std::size_t>(r) * static_cast<std::size_t>(s.ncols) +
                static_cast<std::size_t>(c)] = sum / cnt;
          }
        }
        noise.swap(tmp);
      }
      const auto [lo, hi] = std::minmax_element(noise.begin(), noise.end());
      const double span = *hi - *lo;
      for (std::size_t i = 0; i < n; ++i) {
        e[i] = span > 0.0 ? s.base + s.amplitude * (noise[i] - *lo) / span : s.base;
      }
      break;
    }
  }
  return TerrainGrid(s.ncols, s.nrows, s.cell_size, std::move(e));
}

}  // namespace agplan
