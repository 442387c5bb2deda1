#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "agplan/config.hpp"

namespace agplan {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitNoPath = 4,
  kExitBattery = 5,
  kExitSwitchCap = 6,
  kExitInternal = 7,
};

/// Runs the command line `args` (args[0] is the program name). Diagnostics
/// go to `err`, progress to `out`; config values are also read from `env`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env);

}  // namespace agplan
