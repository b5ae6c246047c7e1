#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace al_cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kPartial = 2, kSizeGuard = 3 };

/// Runs one resolved command, writing into cfg.out. Returns the exit code;
/// ConfigError propagates before any file is created.
int run_command(const RunConfig& cfg, std::ostream& log);

}  // namespace al_cli
