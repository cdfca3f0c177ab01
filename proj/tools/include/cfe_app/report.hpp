#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "cfe_app/config.hpp"

namespace cfe::app {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// A numerical identity or criterion. Non-gating checks are diagnostics: they are
/// reported but do not change the exit code.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool gating = true;
  std::string note;
};

/// Extra artifact written verbatim next to the tables (matrix dumps).
struct Attachment {
  std::string filename;
  std::string content;
};

struct Report {
  std::string command;
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::vector<Attachment> attachments;
  std::vector<std::string> warnings;

  bool all_passed() const;
};

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigError = 2, kSolverFailure = 3 };

/// Writes <table>.csv files plus checks.csv, or a single results.json, and every
/// attachment. Output depends only on the report, never on the clock.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir,
                                                OutputFormat format);

/// metadata.json with the run's provenance (time stamp, command line, config source).
void write_metadata(const std::filesystem::path& dir, const std::string& command, const RunConfig& config,
                    const std::vector<std::string>& argv, int exit_code);

/// 17 significant digits, the CSV convention for every float.
std::string format_double(double v);

}  // namespace cfe::app
