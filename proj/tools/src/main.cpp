// cfe: command-line driver for the coherent-expansion verification suites.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfe/errors.hpp"
#include "cfe_app/commands.hpp"
#include "cfe_app/config.hpp"
#include "cfe_app/report.hpp"

namespace {

constexpr const char* kConfigEnv = "CFE_CONFIG";

void print_summary(const cfe::app::Report& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS" : (c.gating ? "FAIL" : "INFO")) << "  " << c.name
              << "  value=" << cfe::app::format_double(c.value) << "  tol=" << cfe::app::format_double(c.tolerance);
    if (!c.note.empty()) std::cout << "  (" << c.note << ')';
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cfe::app;
  CLI::App app{"Coherent-state functional expansion: verification suites"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  unsigned threads = 0;
  app.add_option("--config", config_path, std::string("YAML run configuration (default: $") + kConfigEnv + ")");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--format", format, "csv or json (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "assembly threads (overrides threads)")->check(CLI::PositiveNumber);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"overlaps", "coherent overlap, number projection and Gram identities"},
      {"spectrum", "assemble an operator variant and solve for its leading eigenpairs"},
      {"compare", "Fock-space oracle against the mean-field energy per particle"},
      {"perturb", "perturbation series in epsilon against direct diagonalisation"},
      {"scan", "ground eigenvalue over a parameter sweep"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (config_path.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) config_path = env;
  }
  if (config_path.empty()) {
    std::cerr << "error: no configuration given (use --config or set " << kConfigEnv << ")\n";
    return kConfigError;
  }

  RunConfig config;
  Report report;
  try {
    config = load_config(config_path);
    if (!out_dir.empty()) config.output.dir = out_dir;
    if (!format.empty()) config.output.format = parse_format(format);
    if (threads > 0) config.threads = threads;
    report = run_command(command, config);
  } catch (const cfe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const cfe::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const cfe::RangeError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }

  const int code = report.all_passed() ? kPass : kCheckFailed;
  try {
    write_report(report, config.output.dir, config.output.format);
    write_metadata(config.output.dir, command, config, std::vector<std::string>(argv, argv + argc), code);
  } catch (const cfe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  print_summary(report);
  return code;
}
