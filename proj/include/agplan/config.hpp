#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agplan/planner.hpp"

namespace agplan {

/// Flat `section.key = value` settings. Later layers override earlier ones:
/// built-in defaults, then a config file, then AGPLAN_* environment
/// variables, then --set flags.
using ConfigMap = std::map<std::string, std::string>;

/// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

bool is_config_key(const std::string& key);

/// AGPLAN_ + upper-cased key with '.' replaced by '_', e.g. AGPLAN_BAS_ALPHA.
std::string env_var_for(const std::string& key);

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError on
/// malformed lines, unknown keys and repeated keys, naming `source` and the
/// line number.
ConfigMap parse_config_text(std::string_view text, const std::string& source = "<config>");
ConfigMap load_config_file(const std::string& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the AGPLAN_* variable of every key through `lookup`.
ConfigMap config_from_env(const EnvLookup& lookup);
EnvLookup process_env();

/// Parses `key=value` flag arguments.
ConfigMap parse_assignments(const std::vector<std::string>& assignments);

/// Right-most layer wins.
ConfigMap merge_layers(const std::vector<ConfigMap>& layers);

/// Applies `values` on top of the defaults for this cell size and validates
/// the result. Throws ConfigError on bad values or invalid combinations.
PlannerConfig resolve_config(const ConfigMap& values, double cell_size);

/// Every key with its resolved value.
ConfigMap config_values(const PlannerConfig& config);
std::string dump_config(const PlannerConfig& config);

}  // namespace agplan
