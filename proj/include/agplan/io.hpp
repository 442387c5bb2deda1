#pragma once

#include <string>

#include "agplan/config.hpp"
#include "agplan/planner.hpp"
#include "agplan/terrain.hpp"

namespace agplan {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Exports use world coordinates (the DEM's georeferencing).

/// x,y,z,mode,cum_energy_J,soc per node.
std::string path_csv(const PlannedPath& path, const TerrainGrid& grid);

/// Reads a path CSV back. Positions are returned in the grid's local frame
/// when `grid` is given, world coordinates otherwise. A node is a switch
/// point when the next node arrives in the other mode.
PlannedPath parse_path_csv(const std::string& text, const TerrainGrid* grid = nullptr);

/// FeatureCollection with one LineString per mode leg.
std::string path_geojson(const PlannedPath& path, const TerrainGrid& grid,
                         const EnergyParams& energy, const BatterySettings& battery);

/// FeatureCollection with one Point per switch at the optimised location.
std::string switch_points_geojson(const PlannedPath& path, const TerrainGrid& grid);

/// node,mode,cum_energy_J,soc
std::string soc_csv(const PlannedPath& path);

/// switch,iteration,x,y,z,f,e_term,r_term
std::string bas_trace_csv(const PlannedPath& path, const TerrainGrid& grid);

/// leg,mode,x,y,z
std::string smoothed_csv(const SmoothedPath& smoothed, const TerrainGrid& grid);

std::string summary_json(const PlannedPath& path, const EnergyAccount& account,
                         const SmoothedPath* smoothed, const PlannerConfig& config);

}  // namespace agplan
