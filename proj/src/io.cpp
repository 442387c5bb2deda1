#include "agplan/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "agplan/numfmt.hpp"

namespace agplan {

using nlohmann::ordered_json;

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() /
                       ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

Vec3 to_world(const TerrainGrid& grid, const Vec3& p) {
  return {grid.world_x(p.x), grid.world_y(p.y), p.z};
}

ordered_json coords(const Vec3& p) { return ordered_json::array({p.x, p.y, p.z}); }

ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string path_csv(const PlannedPath& path, const TerrainGrid& grid) {
  std::string out = "x,y,z,mode,cum_energy_J,soc\n";
  for (const PathNode& n : path.nodes) {
    const Vec3 w = to_world(grid, n.position);
    out += format_double(w.x) + "," + format_double(w.y) + "," + format_double(w.z) + "," +
           to_string(n.mode) + "," + format_double(n.cumulative_energy) + "," +
           format_double(n.soc) + "\n";
  }
  return out;
}

PlannedPath parse_path_csv(const std::string& text, const TerrainGrid* grid) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{
                                     "x", "y", "z", "mode", "cum_energy_J", "soc"}) {
    throw IoError("path CSV: expected header x,y,z,mode,cum_energy_J,soc");
  }
  PlannedPath path;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv(line);
    const std::string where = "path CSV line " + std::to_string(lineno);
    if (f.size() != 6) throw IoError(where + ": expected 6 fields");
    double v[5];
    const int idx[5] = {0, 1, 2, 4, 5};
    for (int i = 0; i < 5; ++i) {
      if (!parse_double(f[static_cast<std::size_t>(idx[i])], v[i])) {
        throw IoError(where + ": bad number '" + f[static_cast<std::size_t>(idx[i])] + "'");
      }
    }
    PathNode n;
    n.position = grid ? Vec3{grid->local_x(v[0]), grid->local_y(v[1]), v[2]} : Vec3{v[0], v[1], v[2]};
    try {
      n.mode = parse_mode(f[3]);
    } catch (const Error&) {
      throw IoError(where + ": bad mode '" + f[3] + "'");
    }
    n.cumulative_energy = v[3];
    n.soc = v[4];
    path.nodes.push_back(n);
  }
  if (path.nodes.empty()) throw IoError("path CSV has no nodes");
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    if (i > 0 && path.nodes[i + 1].mode != path.nodes[i].mode) {
      path.nodes[i].is_switch_point = true;
    }
  }
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    path.total_distance += distance(path.nodes[i - 1].position, path.nodes[i].position);
  }
  path.total_energy = path.nodes.back().cumulative_energy;
  path.initial_soc = path.nodes.front().soc;
  return path;
}

std::string path_geojson(const PlannedPath& path, const TerrainGrid& grid,
                         const EnergyParams& energy, const BatterySettings& battery) {
  const EnergyAccount acc = recompute_account(path, energy, battery);
  ordered_json features = ordered_json::array();
  for (std::size_t l = 0; l < path.legs.size(); ++l) {
    const ModeLeg& leg = path.legs[l];
    ordered_json line = ordered_json::array();
    for (std::size_t i = leg.first; i <= leg.last; ++i) {
      line.push_back(coords(to_world(grid, path.nodes[i].position)));
    }
    ordered_json props;
    props["leg"] = l;
    props["mode"] = to_string(leg.mode);
    props["energy_J"] = l < acc.per_leg.size() ? acc.per_leg[l].joules : 0.0;
    props["distance_m"] = l < acc.per_leg.size() ? acc.per_leg[l].meters : 0.0;
    props["first_node"] = leg.first;
    props["last_node"] = leg.last;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", line}}},
                        {"properties", props}});
  }
  ordered_json doc{{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

std::string switch_points_geojson(const PlannedPath& path, const TerrainGrid& grid) {
  ordered_json features = ordered_json::array();
  for (const SwitchRecord& s : path.switch_points) {
    ordered_json props;
    props["node"] = s.index;
    props["direction"] = to_string(s.direction);
    props["initial"] = coords(to_world(grid, s.initial_point));
    props["optimized"] = coords(to_world(grid, s.optimized_point));
    props["initial_cell"] = ordered_json::array({s.initial_cell.col, s.initial_cell.row});
    props["optimized_cell"] = ordered_json::array({s.optimized_cell.col, s.optimized_cell.row});
    props["initial_fitness"] = finite_or_null(s.initial_fitness.f);
    props["optimized_fitness"] = finite_or_null(s.optimized_fitness.f);
    props["evaluations"] = s.evaluations;
    features.push_back(
        {{"type", "Feature"},
         {"geometry", {{"type", "Point"}, {"coordinates", coords(to_world(grid, s.optimized_point))}}},
         {"properties", props}});
  }
  ordered_json doc{{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

std::string soc_csv(const PlannedPath& path) {
  std::string out = "node,mode,cum_energy_J,soc\n";
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const PathNode& n = path.nodes[i];
    out += std::to_string(i) + "," + to_string(n.mode) + "," + format_double(n.cumulative_energy) +
           "," + format_double(n.soc) + "\n";
  }
  return out;
}

std::string bas_trace_csv(const PlannedPath& path, const TerrainGrid& grid) {
  std::string out = "switch,iteration,x,y,z,f,e_term,r_term\n";
  for (std::size_t s = 0; s < path.switch_points.size(); ++s) {
    for (const BasTraceEntry& e : path.switch_points[s].trace) {
      const Vec3 w = to_world(grid, e.point);
      out += std::to_string(s) + "," + std::to_string(e.iteration) + "," + format_double(w.x) +
             "," + format_double(w.y) + "," + format_double(w.z) + "," +
             format_double(e.fitness.f) + "," + format_double(e.fitness.e_term) + "," +
             format_double(e.fitness.r_term) + "\n";
    }
  }
  return out;
}

std::string smoothed_csv(const SmoothedPath& smoothed, const TerrainGrid& grid) {
  std::string out = "leg,mode,x,y,z\n";
  for (std::size_t l = 0; l < smoothed.legs.size(); ++l) {
    for (const Vec3& p : smoothed.legs[l].samples) {
      const Vec3 w = to_world(grid, p);
      out += std::to_string(l) + "," + to_string(smoothed.legs[l].mode) + "," + format_double(w.x) +
             "," + format_double(w.y) + "," + format_double(w.z) + "\n";
    }
  }
  return out;
}

std::string summary_json(const PlannedPath& path, const EnergyAccount& account,
                         const SmoothedPath* smoothed, const PlannerConfig& config) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["reached_goal"] = path.reached_goal;
  doc["total_energy_J"] = path.total_energy;
  doc["total_distance_m"] = path.total_distance;
  doc["initial_soc"] = path.initial_soc;
  doc["final_soc"] = path.nodes.empty() ? path.initial_soc : path.nodes.back().soc;
  doc["node_count"] = path.nodes.size();
  doc["switch_count"] = path.switch_points.size();
  doc["transforms"] = account.transforms;
  ordered_json legs = ordered_json::array();
  for (std::size_t l = 0; l < path.legs.size(); ++l) {
    legs.push_back({{"mode", to_string(path.legs[l].mode)},
                    {"first_node", path.legs[l].first},
                    {"last_node", path.legs[l].last},
                    {"energy_J", l < account.per_leg.size() ? account.per_leg[l].joules : 0.0},
                    {"distance_m", l < account.per_leg.size() ? account.per_leg[l].meters : 0.0}});
  }
  doc["legs"] = legs;
  ordered_json flights = ordered_json::array();
  for (const FlightLog& f : path.flights) {
    ordered_json stages = ordered_json::array();
    for (FlightStage s : f.stages) stages.push_back(to_string(s));
    ordered_json entry{{"mode", to_string(f.mode)}, {"outcome", to_string(f.outcome)}, {"stages", stages}};
    entry["repaired_from"] = f.repaired_from ? ordered_json(*f.repaired_from) : ordered_json(nullptr);
    flights.push_back(entry);
  }
  doc["flights"] = flights;
  if (smoothed != nullptr) {
    doc["smoothing"] = {{"samples", smoothed->samples.size()},
                        {"max_deviation_m", smoothed->max_deviation}};
  }
  ordered_json cfg;
  for (const auto& [k, v] : config_values(config)) cfg[k] = v;
  doc["config"] = cfg;
  return doc.dump(2) + "\n";
}

}  // namespace agplan
