#include "agplan/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "agplan/ground_search.hpp"
#include "agplan/kernels.hpp"
#include "agplan/numfmt.hpp"

namespace agplan {

using nlohmann::ordered_json;

// --- scenarios --------------------------------------------------------------

TerrainGrid scenario_terrain(const Scenario& s) {
  if (s.dem_path) return load_dem_file(*s.dem_path);
  if (!s.synth) throw ConfigError("scenario '" + s.name + "' has no terrain");
  TerrainGrid base = synthesize_terrain(*s.synth);
  if (!s.overlay) return base;
  const TerrainGrid over = synthesize_terrain(*s.overlay);
  if (over.ncols() != base.ncols() || over.nrows() != base.nrows()) {
    throw ConfigError("scenario '" + s.name + "': overlay size differs from terrain");
  }
  std::vector<double> z(base.elevations().begin(), base.elevations().end());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += over.elevations()[i];
  return TerrainGrid(base.ncols(), base.nrows(), base.cell_size(), std::move(z), 0.0, 0.0,
                     std::nullopt);
}

PlannerConfig scenario_config(const Scenario& s, const TerrainGrid& grid) {
  PlannerConfig c = resolve_config(s.overrides, grid.cell_size());
  c.validate(grid);
  return c;
}

namespace {

SynthSpec ridge_spec(double amplitude, double flank_slope, double base) {
  SynthSpec r;
  r.kind = SynthKind::ridge;
  r.ncols = 48;
  r.nrows = 16;
  r.cell_size = 12.0;
  r.amplitude = amplitude;
  r.flank_slope = flank_slope;
  r.base = base;
  r.center_col = 24;
  return r;
}

SynthSpec noise_spec(int ncols, int nrows, double amplitude, std::uint64_t seed) {
  SynthSpec n;
  n.kind = SynthKind::random_smooth;
  n.ncols = ncols;
  n.nrows = nrows;
  n.cell_size = 12.0;
  n.amplitude = amplitude;
  n.seed = seed;
  return n;
}

}  // namespace

const std::vector<Scenario>& bundled_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> v;
    SynthSpec flat;
    flat.kind = SynthKind::flat;
    flat.ncols = 20;
    flat.nrows = 20;
    v.push_back({"flat", flat, std::nullopt, std::nullopt, {1, 1}, {18, 18}, {}});
    v.push_back({"ridge", ridge_spec(50.0, 0.3, 0.0), std::nullopt, std::nullopt, {2, 8}, {45, 8}, {}});
    v.push_back(
        {"sloped-ridge", ridge_spec(50.0, 0.34, 0.0), std::nullopt, std::nullopt, {2, 8}, {45, 8}, {}});
    SynthSpec ring;
    ring.kind = SynthKind::ring;
    ring.ncols = 40;
    ring.nrows = 40;
    ring.amplitude = 50.0;
    v.push_back({"ring", ring, std::nullopt, std::nullopt, {1, 20}, {20, 20}, {}});
    v.push_back({"low", ridge_spec(40.0, 0.3, 50.0), noise_spec(48, 16, 1.5, 11), std::nullopt,
                 {2, 8}, {45, 8}, {}});
    v.push_back({"high", ridge_spec(60.0, 0.32, 800.0), noise_spec(48, 16, 2.0, 12), std::nullopt,
                 {2, 5}, {45, 11}, {}});
    SynthSpec comp = ridge_spec(50.0, 0.31, 300.0);
    comp.ncols = 64;
    comp.nrows = 24;
    comp.center_col = 32;
    v.push_back({"composite", comp, noise_spec(64, 24, 3.0, 13), std::nullopt, {2, 12}, {61, 12}, {}});
    return v;
  }();
  return all;
}

const Scenario& bundled_scenario(const std::string& name) {
  for (const Scenario& s : bundled_scenarios()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

GridIndex parse_cell(const std::string& where, const std::string& v) {
  const auto comma = v.find(',');
  long long c = 0;
  long long r = 0;
  if (comma == std::string::npos || !parse_int(trim(v.substr(0, comma)), c) ||
      !parse_int(trim(v.substr(comma + 1)), r)) {
    throw ConfigError(where + ": expected col,row, got '" + v + "'");
  }
  return {static_cast<int>(c), static_cast<int>(r)};
}

void set_synth_field(SynthSpec& s, const std::string& field, const std::string& v,
                     const std::string& where) {
  const auto num = [&](double& out) {
    if (!parse_double(v, out)) throw ConfigError(where + ": bad number '" + v + "'");
  };
  const auto integer = [&](int& out) {
    long long n = 0;
    if (!parse_int(v, n)) throw ConfigError(where + ": bad integer '" + v + "'");
    out = static_cast<int>(n);
  };
  if (field == "kind") {
    try {
      s.kind = parse_synth_kind(v);
    } catch (const Error&) {
      throw ConfigError(where + ": unknown terrain kind '" + v + "'");
    }
  } else if (field == "ncols") {
    integer(s.ncols);
  } else if (field == "nrows") {
    integer(s.nrows);
  } else if (field == "cell_size") {
    num(s.cell_size);
  } else if (field == "amplitude") {
    num(s.amplitude);
  } else if (field == "seed") {
    long long n = 0;
    if (!parse_int(v, n) || n < 0) throw ConfigError(where + ": bad seed '" + v + "'");
    s.seed = static_cast<std::uint64_t>(n);
  } else if (field == "base") {
    num(s.base);
  } else if (field == "flank_slope") {
    num(s.flank_slope);
  } else if (field == "flank_cells") {
    integer(s.flank_cells);
  } else if (field == "crest_cells") {
    integer(s.crest_cells);
  } else if (field == "center_col") {
    integer(s.center_col);
  } else if (field == "center_row") {
    integer(s.center_row);
  } else if (field == "inner_radius") {
    integer(s.inner_radius);
  } else if (field == "smoothing_passes") {
    integer(s.smoothing_passes);
  } else {
    throw ConfigError(where + ": unknown terrain field '" + field + "'");
  }
}

std::string synth_lines(const std::string& prefix, const SynthSpec& s) {
  std::string out;
  const auto line = [&](const std::string& k, const std::string& v) {
    out += prefix + "." + k + " = " + v + "\n";
  };
  line("kind", to_string(s.kind));
  line("ncols", std::to_string(s.ncols));
  line("nrows", std::to_string(s.nrows));
  line("cell_size", format_double(s.cell_size));
  line("amplitude", format_double(s.amplitude));
  line("seed", std::to_string(s.seed));
  line("base", format_double(s.base));
  line("flank_slope", format_double(s.flank_slope));
  line("flank_cells", std::to_string(s.flank_cells));
  line("crest_cells", std::to_string(s.crest_cells));
  line("center_col", std::to_string(s.center_col));
  line("center_row", std::to_string(s.center_row));
  line("inner_radius", std::to_string(s.inner_radius));
  line("smoothing_passes", std::to_string(s.smoothing_passes));
  return out;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& base_dir,
                             const std::string& source) {
  Scenario s;
  bool have_start = false;
  bool have_goal = false;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      s.name = value;
    } else if (key == "start") {
      s.start = parse_cell(where, value);
      have_start = true;
    } else if (key == "goal") {
      s.goal = parse_cell(where, value);
      have_goal = true;
    } else if (key == "dem") {
      const std::filesystem::path p(value);
      s.dem_path = (p.is_relative() && !base_dir.empty()) ? (std::filesystem::path(base_dir) / p).string()
                                                          : value;
    } else if (key.rfind("synth.", 0) == 0) {
      if (!s.synth) s.synth = SynthSpec{};
      set_synth_field(*s.synth, key.substr(6), value, where);
    } else if (key.rfind("overlay.", 0) == 0) {
      if (!s.overlay) s.overlay = SynthSpec{};
      set_synth_field(*s.overlay, key.substr(8), value, where);
    } else if (key.rfind("config.", 0) == 0) {
      const std::string ck = key.substr(7);
      if (!is_config_key(ck)) throw ConfigError(where + ": unknown config key '" + ck + "'");
      s.overrides[ck] = value;
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  if (s.name.empty()) throw ConfigError(source + ": missing name");
  if (!have_start || !have_goal) throw ConfigError(source + ": start and goal are required");
  if (s.dem_path.has_value() == s.synth.has_value()) {
    throw ConfigError(source + ": give exactly one of dem or synth.*");
  }
  if (s.start == s.goal) throw ConfigError(source + ": start and goal coincide");
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), std::filesystem::path(path).parent_path().string(), path);
}

std::string scenario_text(const Scenario& s) {
  std::string out = "name = " + s.name + "\n";
  out += "start = " + std::to_string(s.start.col) + "," + std::to_string(s.start.row) + "\n";
  out += "goal = " + std::to_string(s.goal.col) + "," + std::to_string(s.goal.row) + "\n";
  if (s.dem_path) out += "dem = " + *s.dem_path + "\n";
  if (s.synth) out += synth_lines("synth", *s.synth);
  if (s.overlay) out += synth_lines("overlay", *s.overlay);
  for (const auto& [k, v] : s.overrides) out += "config." + k + " = " + v + "\n";
  return out;
}

// --- scenario runs -----------------------------------------------------------

namespace {

PlanOutcome outcome_of(const PlannedPath& p) {
  PlanOutcome o;
  o.ok = true;
  o.energy = p.total_energy;
  o.switches = p.switch_points.size();
  for (const PathNode& n : p.nodes) o.soc.push_back(n.soc);
  for (const SwitchRecord& s : p.switch_points) {
    o.switch_points.push_back(
        {s.direction, s.initial_cell, s.optimized_cell, s.initial_fitness.f, s.optimized_fitness.f});
  }
  return o;
}

PlanOutcome failure(const std::string& what) {
  PlanOutcome o;
  o.error = what;
  return o;
}

}  // namespace

ScenarioRun run_scenario(const Scenario& s) {
  ScenarioRun run;
  run.scenario = s.name;
  try {
    const TerrainGrid grid = scenario_terrain(s);
    PlannerConfig cfg = scenario_config(s, grid);
    for (bool opt : {true, false}) {
      cfg.optimize = opt;
      PlanOutcome& slot = opt ? run.optimized : run.unoptimized;
      try {
        slot = outcome_of(plan(grid, s.start, s.goal, cfg));
      } catch (const Error& e) {
        slot = failure(e.what());
      }
    }
  } catch (const Error& e) {
    run.optimized = failure(e.what());
    run.unoptimized = failure(e.what());
  }
  if (run.optimized.ok && run.unoptimized.ok) {
    run.savings = run.unoptimized.energy > 0.0 ? 1.0 - run.optimized.energy / run.unoptimized.energy
                                               : 0.0;
  }
  return run;
}

std::vector<ScenarioRun> run_scenarios(const std::vector<Scenario>& scenarios) {
  return map_parallel(scenarios, [](const Scenario& s) { return run_scenario(s); });
}

std::vector<ScenarioRun> run_scenarios_serial(const std::vector<Scenario>& scenarios) {
  return map_serial(scenarios, [](const Scenario& s) { return run_scenario(s); });
}

// --- method comparison -------------------------------------------------------

std::size_t normalized_budget(std::size_t budget) {
  if (budget < 3) throw ContractError("comparison budget must be at least 3");
  return 3 * ((budget + 1) / 3) + 1;
}

const std::vector<std::string>& comparison_methods() {
  static const std::vector<std::string> names{"bas", to_string(BaselineMethod::exhaustive_grid),
                                              to_string(BaselineMethod::random_search),
                                              to_string(BaselineMethod::particle_swarm)};
  return names;
}

SwitchOptimizer comparison_optimizer(const std::string& method, std::size_t budget,
                                     std::uint64_t seed, const BasParams& bas) {
  if (method == "bas") {
    BasParams p = bas;
    p.iterations = static_cast<int>((budget - 1) / 3);
    p.seed = seed;
    return bas_optimizer(p);
  }
  BaselineMethod m;
  if (method == to_string(BaselineMethod::exhaustive_grid)) {
    m = BaselineMethod::exhaustive_grid;
  } else if (method == to_string(BaselineMethod::random_search)) {
    m = BaselineMethod::random_search;
  } else if (method == to_string(BaselineMethod::particle_swarm)) {
    m = BaselineMethod::particle_swarm;
  } else {
    throw ConfigError("unknown optimiser '" + method + "'");
  }
  return [m, budget, seed](const SwitchDomain& d, const FitnessFn& f, std::size_t k) {
    return baseline_optimize(m, budget, d, f, seed + k);
  };
}

MethodComparison run_method_comparison(const Scenario& scenario, std::size_t budget,
                                       std::uint64_t seed, std::vector<MethodTiming>* timings) {
  MethodComparison out;
  out.scenario = scenario.name;
  out.budget_requested = budget;
  out.budget = normalized_budget(budget);
  out.bas_iterations = (out.budget - 1) / 3;
  out.seed = seed;

  const TerrainGrid grid = scenario_terrain(scenario);
  PlannerConfig cfg = scenario_config(scenario, grid);
  cfg.optimize = true;
  const std::vector<std::uint8_t> mask = feasibility_mask(grid, cfg.limits);
  const BatteryState battery(cfg.battery);
  const GroundSearchResult gr =
      search_ground(grid, scenario.start, scenario.goal, cfg.limits, cfg.energy, battery);
  if (gr.outcome != GroundOutcome::takeoff_required) {
    throw NoPathError("scenario '" + scenario.name + "' has no takeoff to optimise", PlannedPath{});
  }
  out.initial_point = *gr.switching_point;
  const SwitchDomain domain(grid, out.initial_point, cfg.bas.search_radius, mask);
  const FitnessFn fitness =
      make_switch_fitness(domain, cfg.limits, cfg.energy,
                          takeoff_context(grid, gr.partial_path, scenario.goal, cfg),
                          switch_weights(cfg.bas, battery.soc()));
  out.initial_f = fitness(domain.initial_point()).f;

  for (const std::string& method : comparison_methods()) {
    const SwitchOptimizer opt = comparison_optimizer(method, out.budget, seed, cfg.bas);
    CountingFitness counter(fitness);
    const auto t0 = std::chrono::steady_clock::now();
    const SwitchResult r = opt(domain, counter.as_function(), 0);
    const auto t1 = std::chrono::steady_clock::now();
    MethodResult m;
    m.method = method;
    m.evaluations = counter.count();
    m.best_f = r.fitness.f;
    m.best_r = r.fitness.r_term;
    m.best_e = r.fitness.e_term;
    m.point = r.point;
    try {
      m.path_energy = plan(grid, scenario.start, scenario.goal, cfg, opt).total_energy;
      m.path_ok = true;
    } catch (const Error& e) {
      m.path_error = e.what();
    }
    out.methods.push_back(m);
    if (timings != nullptr) {
      timings->push_back(
          {scenario.name, method, std::chrono::duration<double, std::milli>(t1 - t0).count()});
    }
  }
  return out;
}

// --- bowl --------------------------------------------------------------------

BowlScenario bowl_scenario() {
  SynthSpec flat;
  flat.kind = SynthKind::flat;
  flat.ncols = 33;
  flat.nrows = 33;
  flat.cell_size = 12.0;
  BowlScenario b{synthesize_terrain(flat), {}, {16, 16}, {17, 16}, 8.0 * 12.0};
  b.drivable.assign(b.grid.cell_count(), 1);
  return b;
}

FitnessFn bowl_fitness(const BowlScenario& bowl) {
  const Vec3 c = bowl.grid.surface_point(bowl.optimum);
  const double cs = bowl.grid.cell_size();
  return [c, cs](const Vec3& p) {
    const double d2 = ((p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y)) / (cs * cs);
    const double f = 1000.0 + 100.0 * d2;
    return SwitchFitness{f, 0.0, f};
  };
}

// --- reports -----------------------------------------------------------------

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + name + "' (json or csv)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }
double num_of(const ordered_json& j) { return j.is_null() ? kInf : j.get<double>(); }

ordered_json cell_json(GridIndex c) { return ordered_json::array({c.col, c.row}); }
GridIndex cell_of(const ordered_json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

ordered_json outcome_json(const PlanOutcome& o) {
  ordered_json j;
  j["ok"] = o.ok;
  j["error"] = o.error;
  j["energy_J"] = o.energy;
  j["switches"] = o.switches;
  j["soc"] = o.soc;
  ordered_json sw = ordered_json::array();
  for (const SwitchSummary& s : o.switch_points) {
    sw.push_back({{"direction", to_string(s.direction)},
                  {"initial_cell", cell_json(s.initial_cell)},
                  {"optimized_cell", cell_json(s.optimized_cell)},
                  {"initial_f", num(s.initial_f)},
                  {"optimized_f", num(s.optimized_f)}});
  }
  j["switch_points"] = sw;
  return j;
}

SwitchDirection direction_of(const std::string& s) {
  if (s == "ground-to-air") return SwitchDirection::ground_to_air;
  if (s == "air-to-ground") return SwitchDirection::air_to_ground;
  throw ReportParseError("unknown switch direction '" + s + "'");
}

PlanOutcome outcome_from(const ordered_json& j) {
  PlanOutcome o;
  o.ok = j.at("ok").get<bool>();
  o.error = j.at("error").get<std::string>();
  o.energy = j.at("energy_J").get<double>();
  o.switches = j.at("switches").get<std::size_t>();
  o.soc = j.at("soc").get<std::vector<double>>();
  for (const auto& s : j.at("switch_points")) {
    o.switch_points.push_back({direction_of(s.at("direction").get<std::string>()),
                               cell_of(s.at("initial_cell")), cell_of(s.at("optimized_cell")),
                               num_of(s.at("initial_f")), num_of(s.at("optimized_f"))});
  }
  return o;
}

std::string emit_json(const ComparisonReport& r) {
  ordered_json doc;
  doc["schema_version"] = r.schema_version;
  ordered_json scen = ordered_json::array();
  for (const ScenarioRun& s : r.scenarios) {
    scen.push_back({{"scenario", s.scenario},
                    {"savings", s.savings ? ordered_json(*s.savings) : ordered_json(nullptr)},
                    {"optimized", outcome_json(s.optimized)},
                    {"unoptimized", outcome_json(s.unoptimized)}});
  }
  doc["scenarios"] = scen;
  ordered_json comps = ordered_json::array();
  for (const MethodComparison& c : r.comparisons) {
    ordered_json methods = ordered_json::array();
    for (const MethodResult& m : c.methods) {
      methods.push_back({{"method", m.method},
                         {"evaluations", m.evaluations},
                         {"best_f", num(m.best_f)},
                         {"best_r", num(m.best_r)},
                         {"best_e", num(m.best_e)},
                         {"point", cell_json(m.point)},
                         {"path_ok", m.path_ok},
                         {"path_error", m.path_error},
                         {"path_energy_J", m.path_energy}});
    }
    comps.push_back({{"scenario", c.scenario},
                     {"budget_requested", c.budget_requested},
                     {"budget", c.budget},
                     {"bas_iterations", c.bas_iterations},
                     {"seed", c.seed},
                     {"initial_cell", cell_json(c.initial_point)},
                     {"initial_f", num(c.initial_f)},
                     {"methods", methods}});
  }
  doc["comparisons"] = comps;
  return doc.dump(2) + "\n";
}

ComparisonReport parse_json(const std::string& text) {
  ComparisonReport r;
  try {
    const ordered_json doc = ordered_json::parse(text);
    r.schema_version = doc.at("schema_version").get<int>();
    for (const auto& s : doc.at("scenarios")) {
      ScenarioRun run;
      run.scenario = s.at("scenario").get<std::string>();
      if (!s.at("savings").is_null()) run.savings = s.at("savings").get<double>();
      run.optimized = outcome_from(s.at("optimized"));
      run.unoptimized = outcome_from(s.at("unoptimized"));
      r.scenarios.push_back(std::move(run));
    }
    for (const auto& c : doc.at("comparisons")) {
      MethodComparison mc;
      mc.scenario = c.at("scenario").get<std::string>();
      mc.budget_requested = c.at("budget_requested").get<std::size_t>();
      mc.budget = c.at("budget").get<std::size_t>();
      mc.bas_iterations = c.at("bas_iterations").get<std::size_t>();
      mc.seed = c.at("seed").get<std::uint64_t>();
      mc.initial_point = cell_of(c.at("initial_cell"));
      mc.initial_f = num_of(c.at("initial_f"));
      for (const auto& m : c.at("methods")) {
        MethodResult mr;
        mr.method = m.at("method").get<std::string>();
        mr.evaluations = m.at("evaluations").get<std::size_t>();
        mr.best_f = num_of(m.at("best_f"));
        mr.best_r = num_of(m.at("best_r"));
        mr.best_e = num_of(m.at("best_e"));
        mr.point = cell_of(m.at("point"));
        mr.path_ok = m.at("path_ok").get<bool>();
        mr.path_error = m.at("path_error").get<std::string>();
        mr.path_energy = m.at("path_energy_J").get<double>();
        mc.methods.push_back(std::move(mr));
      }
      r.comparisons.push_back(std::move(mc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ReportParseError(std::string("report JSON: ") + e.what());
  }
  return r;
}

// Long CSV. Every record opens with a `begin` row; fields follow in order.

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  void row(const std::string& record, const std::string& scenario, const std::string& method,
           const std::string& field, std::size_t index, const std::string& value) {
    out_ += record + "," + csv_field(scenario) + "," + csv_field(method) + "," + field + "," +
            std::to_string(index) + "," + csv_field(value) + "\n";
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_ = "record,scenario,method,field,index,value\n";
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

void outcome_rows(CsvWriter& w, const std::string& name, const std::string& variant,
                  const PlanOutcome& o) {
  w.row("scenario", name, variant, "ok", 0, fmt(o.ok));
  w.row("scenario", name, variant, "error", 0, o.error);
  w.row("scenario", name, variant, "energy_J", 0, fmt(o.energy));
  w.row("scenario", name, variant, "switches", 0, std::to_string(o.switches));
  for (std::size_t i = 0; i < o.soc.size(); ++i) w.row("scenario", name, variant, "soc", i, fmt(o.soc[i]));
  for (std::size_t k = 0; k < o.switch_points.size(); ++k) {
    const SwitchSummary& s = o.switch_points[k];
    w.row("scenario", name, variant, "switch_direction", k, to_string(s.direction));
    w.row("scenario", name, variant, "switch_initial_col", k, std::to_string(s.initial_cell.col));
    w.row("scenario", name, variant, "switch_initial_row", k, std::to_string(s.initial_cell.row));
    w.row("scenario", name, variant, "switch_optimized_col", k, std::to_string(s.optimized_cell.col));
    w.row("scenario", name, variant, "switch_optimized_row", k, std::to_string(s.optimized_cell.row));
    w.row("scenario", name, variant, "switch_initial_f", k, fmt(s.initial_f));
    w.row("scenario", name, variant, "switch_optimized_f", k, fmt(s.optimized_f));
  }
}

std::string emit_csv(const ComparisonReport& r) {
  CsvWriter w;
  w.row("meta", "", "", "schema_version", 0, std::to_string(r.schema_version));
  for (const ScenarioRun& s : r.scenarios) {
    w.row("scenario", s.scenario, "", "begin", 0, "");
    if (s.savings) w.row("scenario", s.scenario, "", "savings", 0, fmt(*s.savings));
    outcome_rows(w, s.scenario, "optimized", s.optimized);
    outcome_rows(w, s.scenario, "unoptimized", s.unoptimized);
  }
  for (const MethodComparison& c : r.comparisons) {
    w.row("comparison", c.scenario, "", "begin", 0, "");
    w.row("comparison", c.scenario, "", "budget_requested", 0, std::to_string(c.budget_requested));
    w.row("comparison", c.scenario, "", "budget", 0, std::to_string(c.budget));
    w.row("comparison", c.scenario, "", "bas_iterations", 0, std::to_string(c.bas_iterations));
    w.row("comparison", c.scenario, "", "seed", 0, std::to_string(c.seed));
    w.row("comparison", c.scenario, "", "initial_col", 0, std::to_string(c.initial_point.col));
    w.row("comparison", c.scenario, "", "initial_row", 0, std::to_string(c.initial_point.row));
    w.row("comparison", c.scenario, "", "initial_f", 0, fmt(c.initial_f));
    for (const MethodResult& m : c.methods) {
      w.row("comparison", c.scenario, m.method, "begin", 0, "");
      w.row("comparison", c.scenario, m.method, "evaluations", 0, std::to_string(m.evaluations));
      w.row("comparison", c.scenario, m.method, "best_f", 0, fmt(m.best_f));
      w.row("comparison", c.scenario, m.method, "best_r", 0, fmt(m.best_r));
      w.row("comparison", c.scenario, m.method, "best_e", 0, fmt(m.best_e));
      w.row("comparison", c.scenario, m.method, "point_col", 0, std::to_string(m.point.col));
      w.row("comparison", c.scenario, m.method, "point_row", 0, std::to_string(m.point.row));
      w.row("comparison", c.scenario, m.method, "path_ok", 0, fmt(m.path_ok));
      w.row("comparison", c.scenario, m.method, "path_error", 0, m.path_error);
      w.row("comparison", c.scenario, m.method, "path_energy_J", 0, fmt(m.path_energy));
    }
  }
  return w.take();
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw ReportParseError("report CSV: unterminated quote");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double csv_double(const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out)) throw ReportParseError("report CSV: bad number '" + v + "'");
  return out;
}

long long csv_int(const std::string& v) {
  long long out = 0;
  if (!parse_int(v, out)) throw ReportParseError("report CSV: bad integer '" + v + "'");
  return out;
}

bool csv_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ReportParseError("report CSV: bad flag '" + v + "'");
}

SwitchSummary& switch_at(PlanOutcome& o, std::size_t k) {
  if (k >= o.switch_points.size()) o.switch_points.resize(k + 1);
  return o.switch_points[k];
}

void apply_outcome_field(PlanOutcome& o, const std::string& field, std::size_t index,
                         const std::string& v) {
  if (field == "ok") {
    o.ok = csv_bool(v);
  } else if (field == "error") {
    o.error = v;
  } else if (field == "energy_J") {
    o.energy = csv_double(v);
  } else if (field == "switches") {
    o.switches = static_cast<std::size_t>(csv_int(v));
  } else if (field == "soc") {
    if (index != o.soc.size()) throw ReportParseError("report CSV: soc rows out of order");
    o.soc.push_back(csv_double(v));
  } else if (field == "switch_direction") {
    switch_at(o, index).direction = direction_of(v);
  } else if (field == "switch_initial_col") {
    switch_at(o, index).initial_cell.col = static_cast<int>(csv_int(v));
  } else if (field == "switch_initial_row") {
    switch_at(o, index).initial_cell.row = static_cast<int>(csv_int(v));
  } else if (field == "switch_optimized_col") {
    switch_at(o, index).optimized_cell.col = static_cast<int>(csv_int(v));
  } else if (field == "switch_optimized_row") {
    switch_at(o, index).optimized_cell.row = static_cast<int>(csv_int(v));
  } else if (field == "switch_initial_f") {
    switch_at(o, index).initial_f = csv_double(v);
  } else if (field == "switch_optimized_f") {
    switch_at(o, index).optimized_f = csv_double(v);
  } else {
    throw ReportParseError("report CSV: unknown scenario field '" + field + "'");
  }
}

void apply_method_field(MethodResult& m, const std::string& field, const std::string& v) {
  if (field == "evaluations") {
    m.evaluations = static_cast<std::size_t>(csv_int(v));
  } else if (field == "best_f") {
    m.best_f = csv_double(v);
  } else if (field == "best_r") {
    m.best_r = csv_double(v);
  } else if (field == "best_e") {
    m.best_e = csv_double(v);
  } else if (field == "point_col") {
    m.point.col = static_cast<int>(csv_int(v));
  } else if (field == "point_row") {
    m.point.row = static_cast<int>(csv_int(v));
  } else if (field == "path_ok") {
    m.path_ok = csv_bool(v);
  } else if (field == "path_error") {
    m.path_error = v;
  } else if (field == "path_energy_J") {
    m.path_energy = csv_double(v);
  } else {
    throw ReportParseError("report CSV: unknown method field '" + field + "'");
  }
}

void apply_comparison_field(MethodComparison& c, const std::string& field, const std::string& v) {
  if (field == "budget_requested") {
    c.budget_requested = static_cast<std::size_t>(csv_int(v));
  } else if (field == "budget") {
    c.budget = static_cast<std::size_t>(csv_int(v));
  } else if (field == "bas_iterations") {
    c.bas_iterations = static_cast<std::size_t>(csv_int(v));
  } else if (field == "seed") {
    c.seed = static_cast<std::uint64_t>(csv_int(v));
  } else if (field == "initial_col") {
    c.initial_point.col = static_cast<int>(csv_int(v));
  } else if (field == "initial_row") {
    c.initial_point.row = static_cast<int>(csv_int(v));
  } else if (field == "initial_f") {
    c.initial_f = csv_double(v);
  } else {
    throw ReportParseError("report CSV: unknown comparison field '" + field + "'");
  }
}

ComparisonReport parse_csv(const std::string& text) {
  const auto rows = read_csv(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"record", "scenario", "method", "field",
                                                         "index", "value"}) {
    throw ReportParseError("report CSV: bad header");
  }
  ComparisonReport r;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 6) {
      throw ReportParseError("report CSV: row " + std::to_string(i + 1) + " has " +
                             std::to_string(row.size()) + " fields");
    }
    const std::string& record = row[0];
    const std::string& name = row[1];
    const std::string& method = row[2];
    const std::string& field = row[3];
    const auto index = static_cast<std::size_t>(csv_int(row[4]));
    const std::string& value = row[5];
    if (record == "meta") {
      if (field != "schema_version") throw ReportParseError("report CSV: unknown meta field");
      r.schema_version = static_cast<int>(csv_int(value));
    } else if (record == "scenario") {
      if (field == "begin") {
        r.scenarios.push_back({});
        r.scenarios.back().scenario = name;
        continue;
      }
      if (r.scenarios.empty()) throw ReportParseError("report CSV: scenario row before begin");
      ScenarioRun& s = r.scenarios.back();
      if (method.empty()) {
        if (field != "savings") throw ReportParseError("report CSV: unknown scenario field");
        s.savings = csv_double(value);
      } else if (method == "optimized") {
        apply_outcome_field(s.optimized, field, index, value);
      } else if (method == "unoptimized") {
        apply_outcome_field(s.unoptimized, field, index, value);
      } else {
        throw ReportParseError("report CSV: unknown variant '" + method + "'");
      }
    } else if (record == "comparison") {
      if (method.empty() && field == "begin") {
        r.comparisons.push_back({});
        r.comparisons.back().scenario = name;
        continue;
      }
      if (r.comparisons.empty()) throw ReportParseError("report CSV: comparison row before begin");
      MethodComparison& c = r.comparisons.back();
      if (method.empty()) {
        apply_comparison_field(c, field, value);
      } else if (field == "begin") {
        c.methods.push_back({});
        c.methods.back().method = method;
      } else {
        if (c.methods.empty() || c.methods.back().method != method) {
          throw ReportParseError("report CSV: method row before begin");
        }
        apply_method_field(c.methods.back(), field, value);
      }
    } else {
      throw ReportParseError("report CSV: unknown record '" + record + "'");
    }
  }
  return r;
}

}  // namespace

std::string emit_report(const ComparisonReport& report, ReportFormat format) {
  return format == ReportFormat::json ? emit_json(report) : emit_csv(report);
}

ComparisonReport parse_report(const std::string& text, ReportFormat format) {
  return format == ReportFormat::json ? parse_json(text) : parse_csv(text);
}

std::string timings_csv(const std::vector<MethodTiming>& timings) {
  std::string out = "scenario,method,wall_ms\n";
  for (const MethodTiming& t : timings) {
    out += csv_field(t.scenario) + "," + t.method + "," + format_double(t.wall_ms) + "\n";
  }
  return out;
}

}  // namespace agplan
