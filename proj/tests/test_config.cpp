#include <doctest.h>

#include <map>

#include "agplan/config.hpp"
#include "agplan/planner.hpp"

using namespace agplan;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
  return [vars](const std::string& k) -> std::optional<std::string> {
    const auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST_CASE("environment variable names") {
  CHECK(env_var_for("bas.alpha") == "AGPLAN_BAS_ALPHA");
  CHECK(env_var_for("flight.c_escape") == "AGPLAN_FLIGHT_C_ESCAPE");
  for (const std::string& k : config_keys()) CHECK(is_config_key(k));
  CHECK_FALSE(is_config_key("bas.beta"));
}

TEST_CASE("config text parsing") {
  const ConfigMap m = parse_config_text("# comment\nbas.alpha = 800\n\n  energy.m=40 # trailing\n");
  CHECK(m.at("bas.alpha") == "800");
  CHECK(m.at("energy.m") == "40");
  CHECK_THROWS_WITH_AS(parse_config_text("bas.beta = 1\n", "f.cfg"), doctest::Contains("f.cfg"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("bas.alpha = 1\nbas.alpha = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_assignments({"bas.alpha"}), ConfigError);
}

TEST_CASE("layer precedence: file < environment < flags") {
  const ConfigMap file = parse_config_text("bas.alpha = 100\nbas.a = 3\nbas.b = 4\n");
  const ConfigMap env = config_from_env(env_of({{"AGPLAN_BAS_ALPHA", "200"}, {"AGPLAN_BAS_A", "5"}}));
  const ConfigMap flags = parse_assignments({"bas.alpha=300"});
  const PlannerConfig c = resolve_config(merge_layers({file, env, flags}), 12.0);
  CHECK(c.bas.alpha == 300.0);
  CHECK(c.bas.w_a == 5.0);
  CHECK(c.bas.w_b == 4.0);
  CHECK(c.bas.w_c == 2.0);
}

TEST_CASE("cell-size dependent defaults and explicit overrides") {
  const PlannerConfig c = resolve_config({}, 5.0);
  CHECK(c.bas.search_radius == 40.0);
  CHECK(c.flight.voxel_size == 5.0);
  const PlannerConfig d = resolve_config({{"bas.search_radius", "30"}, {"flight.z_ceiling", "auto"}}, 5.0);
  CHECK(d.bas.search_radius == 30.0);
  CHECK_FALSE(d.flight.z_ceiling.has_value());
}

TEST_CASE("bad values are config errors") {
  CHECK_THROWS_AS(resolve_config({{"bas.alpha", "-1"}}, 12.0), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"bas.iterations", "ten"}}, 12.0), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"planner.optimize", "maybe"}}, 12.0), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"bas.alpha_schedule", "cubic"}}, 12.0), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"flight.c_escape", "500"}}, 12.0), ConfigError);
  CHECK_THROWS_AS(resolve_config({{"battery.q0", "1e9"}}, 12.0), ConfigError);
}

TEST_CASE("dump and reload is the identity") {
  const PlannerConfig a = resolve_config({{"bas.alpha", "812.5"}, {"energy.m", "41.25"},
                                          {"planner.optimize", "false"}, {"flight.z_ceiling", "400"}},
                                         12.0);
  const PlannerConfig b = resolve_config(parse_config_text(dump_config(a)), 12.0);
  CHECK(config_values(a) == config_values(b));
  CHECK(config_values(a).size() == config_keys().size());
}
