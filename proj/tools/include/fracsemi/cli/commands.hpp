#pragma once

#include <string>

#include "fracsemi/cli/config.hpp"

namespace fracsemi::cli {

// Executes a command, writing report.json plus any profile CSVs into out_dir.
// Returns the process exit code: 0 when every certification in the run passed,
// 1 otherwise. Throws ConfigError for unusable inputs (mapped to exit 2 by the
// caller). Existing outputs are only overwritten when force is set.
int run_command(const RunConfig& config, Command command, const std::string& out_dir,
                int workers, bool force);

}  // namespace fracsemi::cli
