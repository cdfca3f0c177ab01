#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cfe/errors.hpp"
#include "cfe_app/commands.hpp"
#include "cfe_app/config.hpp"

namespace {

namespace fs = std::filesystem;
using cfe::app::parse_config;

const std::string kHead =
    "schema_version: 1\n"
    "lattice: {d: 1, box_len: 6.283185307179586, m_per_dim: 5}\n"
    "params: {gamma: 0.5, u0: -1.5, n_particles: 3, epsilon: 0.2}\n";
const std::string kSmall = kHead +
                           "basis: {n_max: 3}\n"
                           "overlaps: {grid_points: 16, samples: 20, seed: 3}\n";

const cfe::app::Check& find_check(const cfe::app::Report& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no check " + name);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cfe_app_tests_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Overlaps, AllIdentitiesHold) {
  const auto rep = cfe::app::cmd_overlaps(parse_config(kSmall));
  EXPECT_TRUE(rep.all_passed());
  const auto& proj = rep.tables.at(1);
  EXPECT_EQ(proj.name, "projection");
  EXPECT_EQ(std::get<double>(proj.rows.at(0).at(1)), 1.0);  // N = 0 row
}

TEST(Spectrum, WeakVariantReproducesLadder) {
  const auto rep = cfe::app::cmd_spectrum(parse_config(kSmall + "spectrum: {variant: weak, count: 5}\n"));
  EXPECT_TRUE(rep.all_passed());
  EXPECT_TRUE(find_check(rep, "weak_spectrum_equals_ladder").passed);
  EXPECT_EQ(rep.tables.front().rows.size(), 5u);
  EXPECT_EQ(rep.attachments.front().filename, "operator.triplets");
}

TEST(Spectrum, ZeroCutoffGivesSingleRow) {
  const auto rep = cfe::app::cmd_spectrum(parse_config(kHead + "basis: {n_max: 0}\nspectrum: {variant: weak, count: 5}\n"));
  EXPECT_EQ(rep.tables.front().rows.size(), 1u);
}

TEST(Spectrum, SignFlippedEpsilonGivesConjugateSpectra) {
  const auto rep = cfe::app::cmd_spectrum(parse_config(kSmall + "spectrum: {variant: full, epsilons: [0.3, 1.0]}\n"));
  EXPECT_TRUE(find_check(rep, "matrix_minus_eps_is_conjugate").passed);
  EXPECT_TRUE(find_check(rep, "spectra_conjugate_multisets").passed);
}

TEST(Spectrum, IterativeMethodIsRejectedWithLocation) {
  try {
    (void)cfe::app::cmd_spectrum(parse_config(kSmall + "solver:\n  method: iterative\n", "x.yaml"));
    FAIL();
  } catch (const cfe::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.yaml:7:"), std::string::npos) << e.what();
  }
}

TEST(Compare, SingleModeIsExact) {
  const auto rep = cfe::app::cmd_compare(parse_config(
      "schema_version: 1\nlattice: {d: 1, box_len: 6.283185307179586, m_per_dim: 1}\nparams: {n_particles: 2}\n"));
  EXPECT_TRUE(find_check(rep, "functional_prediction_exact").passed);
  for (const auto& row : rep.tables.front().rows) EXPECT_EQ(std::get<double>(row.at(3)), 0.0);
}

TEST(Perturb, ZeroOrderSeriesIsTheGroundEigenvalue) {
  const auto rep = cfe::app::cmd_perturb(parse_config(kSmall + "perturb: {max_order: 0, epsilons: [0.1, 0.2]}\n"));
  ASSERT_EQ(rep.tables.front().rows.size(), 1u);
  EXPECT_EQ(std::get<double>(rep.tables.front().rows[0][1]), 0.0);  // ebar = 0 by the choice of u0
}

TEST(Perturb, FirstOrderCoefficientVanishes) {
  const auto rep = cfe::app::cmd_perturb(parse_config(kSmall + "perturb: {max_order: 2, epsilons: [0.1, 0.2]}\n"));
  EXPECT_TRUE(find_check(rep, "first_order_vanishes").passed);
}

TEST(Scan, EpsilonPairsAreConjugate) {
  const auto rep = cfe::app::cmd_scan(parse_config(kSmall + "scan: {parameter: epsilon, values: [-0.3, 0.3]}\n"));
  EXPECT_TRUE(find_check(rep, "ground_conjugate_under_epsilon_sign").passed);
  EXPECT_EQ(rep.tables.front().rows.size(), 2u);
}

TEST(Report, OutputIsByteIdenticalAcrossRuns) {
  for (auto fmt : {cfe::app::OutputFormat::csv, cfe::app::OutputFormat::json}) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto files = cfe::app::write_report(cfe::app::cmd_overlaps(parse_config(kSmall)), a, fmt);
    cfe::app::write_report(cfe::app::cmd_overlaps(parse_config(kSmall)), b, fmt);
    ASSERT_FALSE(files.empty());
    for (const auto& f : files) EXPECT_EQ(slurp(f), slurp(b / f.filename())) << f;
  }
}

TEST(Report, CsvUsesSeventeenDigits) {
  EXPECT_EQ(cfe::app::format_double(0.1), "0.10000000000000001");
  cfe::app::Report r;
  r.tables.push_back({"t", {"a", "b"}, {{std::int64_t{1}, std::string("x,y")}}});
  const auto dir = scratch("csv");
  cfe::app::write_report(r, dir, cfe::app::OutputFormat::csv);
  EXPECT_EQ(slurp(dir / "t.csv"), "a,b\n1,\"x,y\"\n");
  EXPECT_EQ(slurp(dir / "checks.csv"), "check,value,tolerance,passed,gating,note\n");
}

// The installed driver: exit codes, environment default and metadata separation.
int run_cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " " + CFE_CLI_PATH + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / ("cfe_app_tests_" + name + ".yaml");
  std::ofstream(path) << text;
  return path;
}

TEST(Cli, ExitCodes) {
  const auto good = write_config("good", kSmall);
  const auto out = scratch("cli_out");
  EXPECT_EQ(run_cli("overlaps --config " + good.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "metadata.json"));
  EXPECT_TRUE(fs::exists(out / "checks.csv"));

  const auto bad = write_config("bad", "schema_version: 1\nparams: {gamma: -1}\n");
  EXPECT_EQ(run_cli("overlaps --config " + bad.string() + " --out " + out.string()), 2);
  EXPECT_EQ(run_cli("overlaps --config /nonexistent.yaml"), 2);
  EXPECT_EQ(run_cli("bogus --config " + good.string()), 2);

  // A two-point phase quadrature aliases badly: a numerical check fails.
  const auto coarse = write_config("coarse", kHead + "overlaps: {grid_points: 16, samples: 20, mq: 2}\n");
  EXPECT_EQ(run_cli("overlaps --config " + coarse.string() + " --out " + out.string()), 1);

  // Eigenpairs that cannot meet the residual tolerance are a solver failure.
  const auto strict = write_config("strict", kSmall + "solver: {residual_tolerance: 1.0e-300}\nspectrum: {variant: full}\n");
  EXPECT_EQ(run_cli("spectrum --config " + strict.string() + " --out " + out.string()), 3);

  const auto small_limit = write_config("limit", kSmall + "solver: {dense_limit: 10}\n");
  EXPECT_EQ(run_cli("spectrum --config " + small_limit.string() + " --out " + out.string()), 3);
}

TEST(Cli, EnvironmentDefaultAndDeterministicJson) {
  const auto good = write_config("env", kSmall);
  const auto a = scratch("cli_a"), b = scratch("cli_b");
  EXPECT_EQ(run_cli("overlaps --format json --threads 2 --out " + a.string(), "CFE_CONFIG=" + good.string()), 0);
  EXPECT_EQ(run_cli("overlaps --format json --out " + b.string(), "CFE_CONFIG=" + good.string()), 0);
  EXPECT_EQ(slurp(a / "results.json"), slurp(b / "results.json"));
  EXPECT_TRUE(fs::exists(a / "metadata.json"));
  EXPECT_EQ(slurp(a / "results.json").find("created_utc"), std::string::npos);
}

}  // namespace
