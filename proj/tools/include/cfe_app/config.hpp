#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cfe/mode_operator.hpp"
#include "cfe/params.hpp"

namespace cfe::app {

inline constexpr int kSchemaVersion = 1;

enum class OutputFormat { csv, json };

struct LatticeConfig {
  int d = 1;
  double box_len = 6.283185307179586;
  int m_per_dim = 5;
};

struct BasisConfig {
  // One value applies to every real coordinate; a list gives per-coordinate cutoffs.
  std::vector<int> n_max{2};
  double width_factor = 1.0;
};

struct SolverConfig {
  // "dense" or "iterative"; the iterative path only exists for the Hermitian Fock solve.
  std::string method = "dense";
  std::string method_location;  // "source:line:col" of the method key, for diagnostics
  double residual_tolerance = 1e-9;
  std::ptrdiff_t dense_limit = 4000;
  double fock_tolerance = 1e-10;
  std::ptrdiff_t fock_dense_limit = 3000;
  bool calibrate = false;
};

struct OutputConfig {
  std::string dir = "cfe_out";
  OutputFormat format = OutputFormat::csv;
  bool dump_triplets = true;
};

struct OverlapsConfig {
  int grid_points = 16;
  int samples = 100;
  std::uint64_t seed = 1;
  unsigned mq = 64;
  unsigned max_n = 8;
};

struct SpectrumConfig {
  OperatorVariant variant = OperatorVariant::weak;
  std::size_t count = 10;
  // Optional epsilon values; each one is paired with its negative for the conjugation check.
  std::vector<double> epsilons;
};

struct CompareConfig {
  // Contact couplings in units of hbar^2 / (2 m V).
  std::vector<double> couplings{1e-1, 1e-2, 1e-3};
  double hbar2_over_2m = 1.0;
};

struct PerturbConfig {
  std::size_t max_order = 4;
  std::vector<double> epsilons{0.05, 0.0673, 0.0906, 0.122, 0.164, 0.221, 0.297, 0.4};
};

struct ScanConfig {
  std::string parameter = "epsilon";  // epsilon | kappa | gamma
  std::vector<double> values{-0.2, -0.1, 0.1, 0.2};
  OperatorVariant variant = OperatorVariant::full;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string source;  // file name used in diagnostics
  LatticeConfig lattice;
  ModelParams params;
  double r = 1.0;
  BasisConfig basis;
  SolverConfig solver;
  OutputConfig output;
  unsigned threads = 1;
  OverlapsConfig overlaps;
  SpectrumConfig spectrum;
  CompareConfig compare;
  PerturbConfig perturb;
  ScanConfig scan;

  ModeLattice make_lattice() const { return {lattice.d, lattice.box_len, lattice.m_per_dim}; }
  HermiteBasis make_basis(const ModelParams& p) const;
};

/// Parses and validates a YAML run configuration. Every ConfigError names the source,
/// line and column of the offending node.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");

OutputFormat parse_format(const std::string& s);
std::string to_string(OutputFormat f);

}  // namespace cfe::app
