#include "agplan/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <type_traits>
#include <sstream>

#include "agplan/numfmt.hpp"

namespace agplan {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out) || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  if (!parse_int(v, out)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<void(PlannerConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const PlannerConfig&)> get;
};

template <typename Member>
Field real(std::string key, Member member) {
  return {std::move(key),
          [member](PlannerConfig& c, const std::string& k, const std::string& v) {
            member(c) = to_double(k, v);
          },
          [member](const PlannerConfig& c) {
            return format_double(member(c));
          }};
}

template <typename Member>
Field integer(std::string key, Member member) {
  return {std::move(key),
          [member](PlannerConfig& c, const std::string& k, const std::string& v) {
            const long long n = to_integer(k, v);
            using T = std::remove_reference_t<decltype(member(c))>;
            if (n < 0 && std::is_unsigned_v<T>) throw ConfigError(k + " must be >= 0");
            if (n > static_cast<long long>(std::numeric_limits<int>::max()) && !std::is_same_v<T, std::uint64_t>) {
              throw ConfigError(k + " is too large");
            }
            member(c) = static_cast<T>(n);
          },
          [member](const PlannerConfig& c) {
            return std::to_string(member(c));
          }};
}

template <typename Member>
Field boolean(std::string key, Member member) {
  return {std::move(key),
          [member](PlannerConfig& c, const std::string& k, const std::string& v) {
            member(c) = to_bool(k, v);
          },
          [member](const PlannerConfig& c) { return from_bool(member(c)); }};
}

#define AGPLAN_MEMBER(path) [](auto& c) -> auto& { return c.path; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real("energy.rho", AGPLAN_MEMBER(energy.rho)));
    f.push_back(real("energy.m", AGPLAN_MEMBER(energy.mass)));
    f.push_back(real("energy.r", AGPLAN_MEMBER(energy.prop_radius)));
    f.push_back(real("energy.n", AGPLAN_MEMBER(energy.prop_count)));
    f.push_back(real("energy.g", AGPLAN_MEMBER(energy.g)));
    f.push_back(real("energy.eta", AGPLAN_MEMBER(energy.eta)));
    f.push_back(real("energy.mu", AGPLAN_MEMBER(energy.mu)));
    f.push_back(real("energy.cd", AGPLAN_MEMBER(energy.c_d)));
    f.push_back(real("energy.v_fly", AGPLAN_MEMBER(energy.v_fly)));
    f.push_back(real("energy.v_drive", AGPLAN_MEMBER(energy.v_drive)));
    f.push_back(real("energy.a_fly", AGPLAN_MEMBER(energy.a_fly)));
    f.push_back(real("energy.a_drive", AGPLAN_MEMBER(energy.a_drive)));
    f.push_back(real("energy.standby", AGPLAN_MEMBER(energy.standby_energy)));
    f.push_back(real("energy.e_expand_fold", AGPLAN_MEMBER(energy.e_expand_fold)));
    f.push_back(real("energy.e_ground_effect", AGPLAN_MEMBER(energy.e_bodeneffekt)));
    f.push_back(boolean("energy.clamp_descent", AGPLAN_MEMBER(energy.clamp_descent)));

    f.push_back(real("battery.q", AGPLAN_MEMBER(battery.q_capacity)));
    f.push_back(real("battery.q0", AGPLAN_MEMBER(battery.q_initial)));
    f.push_back(real("battery.soc_ref", AGPLAN_MEMBER(battery.soc_ref)));

    f.push_back(real("ground.gx_min", AGPLAN_MEMBER(limits.gx_min)));
    f.push_back(real("ground.gx_max", AGPLAN_MEMBER(limits.gx_max)));
    f.push_back(real("ground.gy_min", AGPLAN_MEMBER(limits.gy_min)));
    f.push_back(real("ground.gy_max", AGPLAN_MEMBER(limits.gy_max)));
    f.push_back(real("ground.gz_min", AGPLAN_MEMBER(limits.gz_min)));
    f.push_back(real("ground.gz_max", AGPLAN_MEMBER(limits.gz_max)));
    f.push_back(real("ground.m_index", AGPLAN_MEMBER(limits.m_index)));
    f.push_back(integer("ground.thre", AGPLAN_MEMBER(limits.count_threshold)));
    f.push_back(real("ground.turn_weight", AGPLAN_MEMBER(limits.turn_weight)));
    f.push_back(real("ground.heuristic_weight", AGPLAN_MEMBER(limits.heuristic_weight)));

    f.push_back(real("flight.c_escape", AGPLAN_MEMBER(flight.c_escape)));
    f.push_back(real("flight.c_landing", AGPLAN_MEMBER(flight.c_landing)));
    f.push_back(real("flight.epsilon", AGPLAN_MEMBER(flight.epsilon)));
    f.push_back({"flight.z_ceiling",
                 [](PlannerConfig& c, const std::string& k, const std::string& v) {
                   if (v == "auto") {
                     c.flight.z_ceiling.reset();
                   } else {
                     c.flight.z_ceiling = to_double(k, v);
                   }
                 },
                 [](const PlannerConfig& c) {
                   return c.flight.z_ceiling ? format_double(*c.flight.z_ceiling)
                                             : std::string("auto");
                 }});
    f.push_back(real("flight.near_goal_radius", AGPLAN_MEMBER(flight.near_goal_radius)));
    f.push_back(real("flight.voxel_size", AGPLAN_MEMBER(flight.voxel_size)));
    f.push_back(real("flight.heuristic_weight", AGPLAN_MEMBER(flight.heuristic_weight)));
    f.push_back(boolean("flight.soc_override", AGPLAN_MEMBER(flight.soc_override)));

    f.push_back(real("bas.d", AGPLAN_MEMBER(bas.antennae_distance)));
    f.push_back(real("bas.step", AGPLAN_MEMBER(bas.step)));
    f.push_back(real("bas.step_decay", AGPLAN_MEMBER(bas.step_decay)));
    f.push_back(integer("bas.iterations", AGPLAN_MEMBER(bas.iterations)));
    f.push_back(real("bas.alpha", AGPLAN_MEMBER(bas.alpha)));
    f.push_back(real("bas.alpha_min", AGPLAN_MEMBER(bas.alpha_min)));
    f.push_back({"bas.alpha_schedule",
                 [](PlannerConfig& c, const std::string& k, const std::string& v) {
                   if (v == "constant") {
                     c.bas.alpha_schedule = AlphaSchedule::constant;
                   } else if (v == "linear") {
                     c.bas.alpha_schedule = AlphaSchedule::linear;
                   } else {
                     throw ConfigError(k + ": expected constant or linear, got '" + v + "'");
                   }
                 },
                 [](const PlannerConfig& c) {
                   return std::string(c.bas.alpha_schedule == AlphaSchedule::linear ? "linear"
                                                                                    : "constant");
                 }});
    f.push_back(real("bas.a", AGPLAN_MEMBER(bas.w_a)));
    f.push_back(real("bas.b", AGPLAN_MEMBER(bas.w_b)));
    f.push_back(real("bas.c", AGPLAN_MEMBER(bas.w_c)));
    f.push_back(integer("bas.seed", AGPLAN_MEMBER(bas.seed)));
    f.push_back(real("bas.search_radius", AGPLAN_MEMBER(bas.search_radius)));

    f.push_back(boolean("planner.optimize", AGPLAN_MEMBER(optimize)));
    f.push_back(integer("planner.max_switches", AGPLAN_MEMBER(max_switches)));
    f.push_back(integer("planner.smoothing_samples", AGPLAN_MEMBER(smoothing_samples)));
    return f;
  }();
  return table;
}

#undef AGPLAN_MEMBER

const Field* find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

bool is_config_key(const std::string& key) { return find_field(key) != nullptr; }

std::string env_var_for(const std::string& key) {
  std::string name = "AGPLAN_";
  for (char ch : key) {
    name += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return name;
}

ConfigMap parse_config_text(std::string_view text, const std::string& source) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!is_config_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!out.emplace(key, value).second) throw ConfigError(where + ": '" + key + "' set twice");
  }
  return out;
}

ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

ConfigMap config_from_env(const EnvLookup& lookup) {
  ConfigMap out;
  for (const std::string& key : config_keys()) {
    if (auto v = lookup(env_var_for(key))) {
      const std::string value = trim(*v);
      if (value.empty()) throw ConfigError(env_var_for(key) + ": empty value");
      out[key] = value;
    }
  }
  return out;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

ConfigMap parse_assignments(const std::vector<std::string>& assignments) {
  ConfigMap out;
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + a + "'");
    const std::string key = trim(std::string_view(a).substr(0, eq));
    const std::string value = trim(std::string_view(a).substr(eq + 1));
    if (!is_config_key(key)) throw ConfigError("unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("empty value for '" + key + "'");
    out[key] = value;
  }
  return out;
}

ConfigMap merge_layers(const std::vector<ConfigMap>& layers) {
  ConfigMap out;
  for (const ConfigMap& layer : layers) {
    for (const auto& [k, v] : layer) out[k] = v;
  }
  return out;
}

PlannerConfig resolve_config(const ConfigMap& values, double cell_size) {
  PlannerConfig c = PlannerConfig::defaults_for(cell_size);
  for (const auto& [key, value] : values) {
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError("unknown key '" + key + "'");
    f->set(c, key, value);
  }
  c.validate();
  return c;
}

ConfigMap config_values(const PlannerConfig& config) {
  ConfigMap out;
  for (const Field& f : fields()) out[f.key] = f.get(config);
  return out;
}

std::string dump_config(const PlannerConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace agplan
