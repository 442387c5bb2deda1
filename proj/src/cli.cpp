#include "agplan/cli.hpp"

#include <filesystem>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "agplan/harness.hpp"
#include "agplan/io.hpp"
#include "agplan/kernels.hpp"
#include "agplan/numfmt.hpp"

namespace agplan {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct ConfigSources {
  std::string file;
  std::vector<std::string> assignments;
};

void add_config_options(CLI::App* cmd, ConfigSources& src) {
  cmd->add_option("--config", src.file, "Config file (key = value lines)");
  cmd->add_option("--set", src.assignments, "Override a config key, e.g. --set bas.alpha=800")
      ->type_name("KEY=VALUE");
}

// defaults < scenario < file < environment < --set
PlannerConfig load_config(const ConfigSources& src, const ConfigMap& scenario_layer,
                          const EnvLookup& env, const TerrainGrid& grid) {
  std::vector<ConfigMap> layers{scenario_layer};
  if (!src.file.empty()) layers.push_back(load_config_file(src.file));
  layers.push_back(config_from_env(env));
  layers.push_back(parse_assignments(src.assignments));
  PlannerConfig c = resolve_config(merge_layers(layers), grid.cell_size());
  c.validate(grid);
  return c;
}

GridIndex parse_cell_arg(const std::string& what, const std::string& v) {
  const auto comma = v.find(',');
  long long c = 0;
  long long r = 0;
  if (comma == std::string::npos || !parse_int(v.substr(0, comma), c) ||
      !parse_int(v.substr(comma + 1), r)) {
    throw UsageError(what + " must be col,row, got '" + v + "'");
  }
  return {static_cast<int>(c), static_cast<int>(r)};
}

struct SynthArgs {
  std::string kind = "flat";
  SynthSpec spec;
};

void add_synth_options(CLI::App* cmd, SynthArgs& a, bool kind_required) {
  auto* k = cmd->add_option(kind_required ? "--kind" : "--synth", a.kind,
                            "Terrain kind: flat, ramp, ridge, ring, random-smooth");
  if (kind_required) k->required();
  cmd->add_option("--ncols", a.spec.ncols, "Columns")->capture_default_str();
  cmd->add_option("--nrows", a.spec.nrows, "Rows")->capture_default_str();
  cmd->add_option("--cell-size", a.spec.cell_size, "Cell size in metres")->capture_default_str();
  cmd->add_option("--amplitude", a.spec.amplitude, "Relief in metres")->capture_default_str();
  cmd->add_option("--seed", a.spec.seed, "Random seed")->capture_default_str();
  cmd->add_option("--base", a.spec.base, "Base elevation in metres")->capture_default_str();
  cmd->add_option("--flank-slope", a.spec.flank_slope, "Ridge/ring flank slope")->capture_default_str();
  cmd->add_option("--flank-cells", a.spec.flank_cells, "Ridge/ring flank width")->capture_default_str();
  cmd->add_option("--crest-cells", a.spec.crest_cells, "Ridge/ring crest width")->capture_default_str();
  cmd->add_option("--center-col", a.spec.center_col, "Crest/ring centre column (-1: middle)")
      ->capture_default_str();
  cmd->add_option("--center-row", a.spec.center_row, "Ring centre row (-1: middle)")
      ->capture_default_str();
  cmd->add_option("--inner-radius", a.spec.inner_radius, "Ring basin radius in cells")
      ->capture_default_str();
  cmd->add_option("--smoothing-passes", a.spec.smoothing_passes, "random-smooth passes")
      ->capture_default_str();
}

SynthSpec synth_spec(const SynthArgs& a) {
  SynthSpec s = a.spec;
  try {
    s.kind = parse_synth_kind(a.kind);
  } catch (const Error&) {
    throw UsageError("unknown terrain kind '" + a.kind + "'");
  }
  return s;
}

Scenario resolve_scenario(const std::string& ref) {
  if (std::filesystem::exists(ref)) return load_scenario_file(ref);
  return bundled_scenario(ref);
}

std::string cell_str(GridIndex c) { return std::to_string(c.col) + "," + std::to_string(c.row); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// --- plan -----------------------------------------------------------------------

struct PlanArgs {
  std::string dem;
  SynthArgs synth;
  std::string scenario;
  std::string start;
  std::string goal;
  std::string out_dir;
  ConfigSources config;
};

void write_plan_outputs(const std::string& dir, const PlannedPath& path, const TerrainGrid& grid,
                        const PlannerConfig& cfg) {
  ensure_dir(dir);
  const EnergyAccount acc = account(path, cfg.energy, cfg.battery);
  std::optional<SmoothedPath> smoothed;
  if (path.nodes.size() >= 2) smoothed = smooth(path, cfg.smoothing_samples);
  write_file_atomic(join(dir, "path.csv"), path_csv(path, grid));
  write_file_atomic(join(dir, "path.geojson"), path_geojson(path, grid, cfg.energy, cfg.battery));
  write_file_atomic(join(dir, "switch_points.geojson"), switch_points_geojson(path, grid));
  write_file_atomic(join(dir, "soc.csv"), soc_csv(path));
  write_file_atomic(join(dir, "bas_trace.csv"), bas_trace_csv(path, grid));
  if (smoothed) write_file_atomic(join(dir, "smoothed.csv"), smoothed_csv(*smoothed, grid));
  write_file_atomic(join(dir, "summary.json"),
                    summary_json(path, acc, smoothed ? &*smoothed : nullptr, cfg));
}

int cmd_plan(const PlanArgs& a, bool synth_given, std::ostream& out, const EnvLookup& env) {
  const int sources = (a.dem.empty() ? 0 : 1) + (synth_given ? 1 : 0) + (a.scenario.empty() ? 0 : 1);
  if (sources != 1) throw UsageError("give exactly one of --dem, --synth or --scenario");

  std::optional<Scenario> scenario;
  if (!a.scenario.empty()) scenario = resolve_scenario(a.scenario);
  const TerrainGrid grid = scenario    ? scenario_terrain(*scenario)
                           : synth_given ? synthesize_terrain(synth_spec(a.synth))
                                         : load_dem_file(a.dem);

  if (!scenario && (a.start.empty() || a.goal.empty())) {
    throw UsageError("--start and --goal are required without --scenario");
  }
  const GridIndex start = a.start.empty() ? scenario->start : parse_cell_arg("--start", a.start);
  const GridIndex goal = a.goal.empty() ? scenario->goal : parse_cell_arg("--goal", a.goal);
  const PlannerConfig cfg =
      load_config(a.config, scenario ? scenario->overrides : ConfigMap{}, env, grid);

  const std::vector<std::uint8_t> mask = feasibility_mask(grid, cfg.limits);
  for (const auto& [label, cell] : {std::pair{"start", start}, std::pair{"goal", goal}}) {
    if (!grid.in_bounds(cell)) throw ConfigError(std::string(label) + " cell " + cell_str(cell) + " is outside the terrain");
    if (!mask[grid.linear(cell)]) throw ConfigError(std::string(label) + " cell " + cell_str(cell) + " is not drivable");
  }

  try {
    const PlannedPath path = plan(grid, start, goal, cfg);
    write_plan_outputs(a.out_dir, path, grid, cfg);
    out << "reached goal: " << format_double(path.total_energy) << " J, "
        << path.switch_points.size() << " switch points, final soc "
        << format_double(path.nodes.back().soc) << "\n";
    return kExitOk;
  } catch (const PlanError& e) {
    write_plan_outputs(a.out_dir, e.partial(), grid, cfg);
    throw;
  }
}

// --- compare --------------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> scenarios;
  bool all = false;
  std::size_t budget = 151;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::string format = "both";
  ConfigSources config;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  if (a.budget < 3) throw UsageError("--budget must be at least 3 (one BAS iteration)");
  if (a.format != "json" && a.format != "csv" && a.format != "both") {
    throw UsageError("--format must be json, csv or both");
  }
  std::vector<Scenario> list;
  if (a.all) list = bundled_scenarios();
  for (const std::string& ref : a.scenarios) list.push_back(resolve_scenario(ref));
  if (list.empty()) throw UsageError("give --scenario or --all");

  // Command-line config layers go on top of each scenario's own overrides.
  std::vector<ConfigMap> extra;
  if (!a.config.file.empty()) extra.push_back(load_config_file(a.config.file));
  extra.push_back(config_from_env(env));
  extra.push_back(parse_assignments(a.config.assignments));
  for (Scenario& s : list) {
    std::vector<ConfigMap> layers{s.overrides};
    layers.insert(layers.end(), extra.begin(), extra.end());
    s.overrides = merge_layers(layers);
  }

  ComparisonReport report;
  report.scenarios = run_scenarios(list);
  std::vector<MethodTiming> timings;
  for (const Scenario& s : list) {
    try {
      report.comparisons.push_back(run_method_comparison(s, a.budget, a.seed, &timings));
    } catch (const NoPathError&) {
      err << "note: scenario '" << s.name << "' has no takeoff; method comparison skipped\n";
    }
  }

  ensure_dir(a.out_dir);
  if (a.format != "csv") {
    write_file_atomic(join(a.out_dir, "compare.json"), emit_report(report, ReportFormat::json));
  }
  if (a.format != "json") {
    write_file_atomic(join(a.out_dir, "compare.csv"), emit_report(report, ReportFormat::csv));
  }
  write_file_atomic(join(a.out_dir, "timings.csv"), timings_csv(timings));
  for (const ScenarioRun& r : report.scenarios) {
    out << r.scenario << ": ";
    if (r.savings) {
      out << "savings " << format_double(*r.savings) << "\n";
    } else {
      out << "failed (" << (r.optimized.ok ? r.unoptimized.error : r.optimized.error) << ")\n";
    }
  }
  return kExitOk;
}

// --- synth ----------------------------------------------------------------------

int cmd_synth(const SynthArgs& a, const std::string& out_path, std::ostream& out) {
  const TerrainGrid grid = synthesize_terrain(synth_spec(a));
  write_file_atomic(out_path, write_dem_string(grid));
  out << "wrote " << grid.ncols() << "x" << grid.nrows() << " grid to " << out_path << "\n";
  return kExitOk;
}

// --- energy-report ----------------------------------------------------------------

int cmd_energy_report(const std::string& path_file, const std::string& out_path,
                      const ConfigSources& src, std::ostream& out, const EnvLookup& env) {
  std::vector<ConfigMap> layers;
  if (!src.file.empty()) layers.push_back(load_config_file(src.file));
  layers.push_back(config_from_env(env));
  layers.push_back(parse_assignments(src.assignments));
  const PlannerConfig cfg = resolve_config(merge_layers(layers), 1.0);

  const PlannedPath path = parse_path_csv(read_file(path_file));
  const EnergyAccount acc = recompute_account(path, cfg.energy, cfg.battery);
  double worst = 0.0;
  for (std::size_t i = 0; i < path.nodes.size(); ++i) {
    const double scale = std::max({1.0, std::abs(acc.cumulative[i]), std::abs(path.nodes[i].cumulative_energy)});
    worst = std::max(worst, std::abs(acc.cumulative[i] - path.nodes[i].cumulative_energy) / scale);
  }
  const bool consistent = worst <= 1e-9;

  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["nodes"] = path.nodes.size();
  doc["total_energy_J"] = acc.total_energy;
  doc["total_distance_m"] = acc.total_distance;
  doc["transforms"] = acc.transforms;
  nlohmann::ordered_json legs = nlohmann::ordered_json::array();
  for (const LegAccount& l : acc.per_leg) {
    legs.push_back({{"mode", to_string(l.mode)}, {"energy_J", l.joules}, {"distance_m", l.meters}});
  }
  doc["legs"] = legs;
  doc["final_soc"] = acc.soc_trace.back();
  doc["recorded_energy_J"] = path.total_energy;
  doc["max_relative_mismatch"] = worst;
  doc["consistent"] = consistent;
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
  if (!consistent) throw InternalConsistencyError("recorded energies disagree with recomputation");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  CLI::App app{"Energy-aware path planner for drive/fly robots over elevation grids", "agplan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", AGPLAN_VERSION);
  app.footer(
      "Config keys may also be set through environment variables named AGPLAN_<SECTION>_<KEY>,\n"
      "e.g. AGPLAN_BAS_ALPHA=800. Precedence: defaults < --config file < environment < --set.\n"
      "Exit codes: 0 ok, 2 usage, 3 config, 4 no path, 5 battery, 6 switch cap, 7 io/internal.");

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a path and write CSV/GeoJSON/JSON artifacts");
  plan_cmd->add_option("--dem", plan_args.dem, "ESRI ASCII grid terrain");
  add_synth_options(plan_cmd, plan_args.synth, false);
  plan_cmd->add_option("--scenario", plan_args.scenario, "Bundled scenario name or scenario file");
  plan_cmd->add_option("--start", plan_args.start, "Start cell col,row");
  plan_cmd->add_option("--goal", plan_args.goal, "Goal cell col,row");
  plan_cmd->add_option("--out", plan_args.out_dir, "Output directory")->required();
  add_config_options(plan_cmd, plan_args.config);

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Savings and switching-point optimiser comparison");
  cmp_cmd->add_option("--scenario", cmp.scenarios, "Bundled scenario name or scenario file");
  cmp_cmd->add_flag("--all", cmp.all, "Run every bundled scenario");
  cmp_cmd->add_option("--budget", cmp.budget, "Fitness evaluations per method")->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.seed, "Optimiser seed")->capture_default_str();
  cmp_cmd->add_option("--format", cmp.format, "json, csv or both")->capture_default_str();
  cmp_cmd->add_option("--out", cmp.out_dir, "Output directory")->required();
  add_config_options(cmp_cmd, cmp.config);

  SynthArgs synth_args;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic terrain as an ESRI ASCII grid");
  add_synth_options(synth_cmd, synth_args, true);
  synth_cmd->add_option("--out", synth_out, "Output .asc file")->required();

  std::string report_path;
  std::string report_out;
  ConfigSources report_cfg;
  auto* report_cmd =
      app.add_subcommand("energy-report", "Recompute the energy ledger of a path CSV");
  report_cmd->add_option("--path", report_path, "path.csv written by plan")->required();
  report_cmd->add_option("--out", report_out, "Output JSON (default: standard output)");
  add_config_options(report_cmd, report_cfg);

  std::vector<const char*> argv;
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*plan_cmd) return cmd_plan(plan_args, plan_cmd->count("--synth") > 0, out, env);
    if (*cmp_cmd) return cmd_compare(cmp, out, err, env);
    if (*synth_cmd) return cmd_synth(synth_args, synth_out, out);
    if (*report_cmd) return cmd_energy_report(report_path, report_out, report_cfg, out, env);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoPathError& e) {
    err << "no path: " << e.what() << "\n";
    return kExitNoPath;
  } catch (const PlanBatteryError& e) {
    err << "battery: " << e.what() << "\n";
    return kExitBattery;
  } catch (const SwitchCapError& e) {
    err << "switch cap: " << e.what() << "\n";
    return kExitSwitchCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace agplan
