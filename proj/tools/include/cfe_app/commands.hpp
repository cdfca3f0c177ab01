#pragma once

#include <string>

#include "cfe_app/config.hpp"
#include "cfe_app/report.hpp"

namespace cfe::app {

// Each command throws ConfigError for invalid input and SolverError when a solve fails;
// numerical verdicts go into the report's checks.
Report cmd_overlaps(const RunConfig& config);
Report cmd_spectrum(const RunConfig& config);
Report cmd_compare(const RunConfig& config);
Report cmd_perturb(const RunConfig& config);
Report cmd_scan(const RunConfig& config);

/// Dispatch by subcommand name; unknown names are a ConfigError.
Report run_command(const std::string& name, const RunConfig& config);

}  // namespace cfe::app
