#include "cfe_app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cfe/errors.hpp"

namespace cfe::app {

namespace {

// Diagnostics carry "source:line:column"; yaml-cpp marks are zero-based.
class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ':' << mark.line + 1 << ':' << mark.column + 1 << ": " << what;
    throw ConfigError(msg.str());
  }
  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const { fail(node.Mark(), what); }

  void expect_map(const YAML::Node& node, const std::string& name) const {
    if (!node.IsMap()) fail(node, "'" + name + "' must be a mapping");
  }

  // Rejects keys outside `allowed`, pointing at the key itself.
  void only_keys(const YAML::Node& block, const std::string& name, const std::set<std::string>& allowed) const {
    for (const auto& kv : block) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) fail(kv.first, "unknown key '" + key + "' in '" + name + "'");
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& name) const {
    if (!node.IsScalar()) fail(node, "'" + name + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + name + "' has the wrong type (got '" + node.Scalar() + "')");
    }
  }

  double finite(const YAML::Node& node, const std::string& name) const {
    const double v = scalar<double>(node, name);
    if (!std::isfinite(v)) fail(node, "'" + name + "' must be finite");
    return v;
  }

  double positive(const YAML::Node& node, const std::string& name) const {
    const double v = finite(node, name);
    if (!(v > 0.0)) fail(node, "'" + name + "' must be > 0");
    return v;
  }

  std::vector<double> list(const YAML::Node& node, const std::string& name) const {
    if (!node.IsSequence()) fail(node, "'" + name + "' must be a list");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(finite(item, name));
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

OperatorVariant parse_variant(const Reader& rd, const YAML::Node& node) {
  const auto s = rd.scalar<std::string>(node, "variant");
  if (s == "weak") return OperatorVariant::weak;
  if (s == "full") return OperatorVariant::full;
  if (s == "scaled") return OperatorVariant::scaled;
  rd.fail(node, "variant must be weak, full or scaled (got '" + s + "')");
}

void read_lattice(const Reader& rd, const YAML::Node& b, LatticeConfig& out) {
  rd.expect_map(b, "lattice");
  rd.only_keys(b, "lattice", {"d", "box_len", "m_per_dim"});
  if (b["d"]) {
    out.d = rd.scalar<int>(b["d"], "d");
    if (out.d < 1 || out.d > 3) rd.fail(b["d"], "lattice dimension d must be 1, 2 or 3");
  }
  if (b["box_len"]) out.box_len = rd.positive(b["box_len"], "box_len");
  if (b["m_per_dim"]) {
    out.m_per_dim = rd.scalar<int>(b["m_per_dim"], "m_per_dim");
    if (out.m_per_dim < 1 || out.m_per_dim % 2 == 0) rd.fail(b["m_per_dim"], "m_per_dim must be a positive odd integer");
  }
}

void read_params(const Reader& rd, const YAML::Node& b, const ModeLattice& lattice, RunConfig& cfg) {
  rd.expect_map(b, "params");
  rd.only_keys(b, "params",
               {"gamma", "gamma_k", "u0", "u_k", "n_particles", "epsilon", "kappa", "p_exp", "q_exp", "r"});
  ModelParams& p = cfg.params;
  if (b["gamma"]) p.gamma = rd.positive(b["gamma"], "gamma");
  if (b["n_particles"]) {
    p.n_particles = rd.scalar<int>(b["n_particles"], "n_particles");
    if (p.n_particles < 0) rd.fail(b["n_particles"], "n_particles must be >= 0");
  }
  if (b["epsilon"]) p.epsilon = rd.finite(b["epsilon"], "epsilon");
  if (b["kappa"]) p.kappa = rd.positive(b["kappa"], "kappa");
  if (b["p_exp"]) p.p_exp = rd.finite(b["p_exp"], "p_exp");
  if (b["q_exp"]) p.q_exp = rd.finite(b["q_exp"], "q_exp");
  if (b["r"]) cfg.r = rd.positive(b["r"], "r");

  if (b["gamma_k"]) {
    const auto& node = b["gamma_k"];
    p.gamma_k = rd.list(node, "gamma_k");
    if (p.gamma_k.size() != lattice.size()) {
      rd.fail(node, "gamma_k has " + std::to_string(p.gamma_k.size()) + " entries but the lattice has " +
                        std::to_string(lattice.size()) + " modes");
    }
    try {
      ModelParams probe;
      probe.gamma_k = p.gamma_k;
      probe.validate(lattice);
    } catch (const ConfigError& e) {
      rd.fail(node, e.what());
    }
  }

  if (b["u_k"] && b["u0"]) rd.fail(b["u0"], "give either u0 or u_k, not both");
  if (b["u0"]) p.set_u0(lattice, rd.finite(b["u0"], "u0"));
  if (b["u_k"]) {
    const auto& node = b["u_k"];
    if (!node.IsSequence()) rd.fail(node, "u_k must be a list of [re, im] pairs");
    p.u_k.clear();
    for (const auto& item : node) {
      if (item.IsScalar()) {
        p.u_k.emplace_back(rd.finite(item, "u_k"), 0.0);
      } else if (item.IsSequence() && item.size() == 2) {
        p.u_k.emplace_back(rd.finite(item[0], "u_k"), rd.finite(item[1], "u_k"));
      } else {
        rd.fail(item, "u_k entries must be a number or an [re, im] pair");
      }
    }
    if (p.u_k.size() != lattice.size()) {
      rd.fail(node, "u_k has " + std::to_string(p.u_k.size()) + " entries but the lattice has " +
                        std::to_string(lattice.size()) + " modes");
    }
    for (std::size_t i = 0; i < p.u_k.size(); ++i) {
      const auto a = p.u_k[i];
      const auto b2 = std::conj(p.u_k[lattice.negated(i)]);
      if (std::abs(a - b2) > 1e-12 * std::max(1.0, std::abs(a))) {
        rd.fail(node[i], "u_k is not conjugate-symmetric: entry " + std::to_string(i) + " must equal conj of entry " +
                             std::to_string(lattice.negated(i)));
      }
    }
  }
  try {
    p.validate(lattice);
  } catch (const ConfigError& e) {
    rd.fail(b, e.what());
  }
}

void read_basis(const Reader& rd, const YAML::Node& b, const ModeLattice& lattice, BasisConfig& out) {
  rd.expect_map(b, "basis");
  rd.only_keys(b, "basis", {"n_max", "width_factor"});
  if (b["n_max"]) {
    const auto& node = b["n_max"];
    out.n_max.clear();
    if (node.IsSequence()) {
      for (const auto& item : node) out.n_max.push_back(rd.scalar<int>(item, "n_max"));
      if (out.n_max.size() != lattice.size() - 1) {
        rd.fail(node, "n_max list needs one cutoff per real coordinate (" + std::to_string(lattice.size() - 1) +
                          "), got " + std::to_string(out.n_max.size()));
      }
    } else {
      out.n_max.push_back(rd.scalar<int>(node, "n_max"));
    }
    for (int n : out.n_max) {
      if (n < 0) rd.fail(node, "n_max must be >= 0");
    }
  }
  if (b["width_factor"]) out.width_factor = rd.positive(b["width_factor"], "width_factor");
}

void read_solver(const Reader& rd, const YAML::Node& b, SolverConfig& out) {
  rd.expect_map(b, "solver");
  rd.only_keys(b, "solver",
               {"method", "residual_tolerance", "dense_limit", "fock_tolerance", "fock_dense_limit", "calibrate"});
  if (b["method"]) {
    out.method = rd.scalar<std::string>(b["method"], "method");
    if (out.method != "dense" && out.method != "iterative") rd.fail(b["method"], "method must be dense or iterative");
    const auto mark = b["method"].Mark();
    out.method_location = rd.source() + ':' + std::to_string(mark.line + 1) + ':' + std::to_string(mark.column + 1);
  }
  if (b["residual_tolerance"]) out.residual_tolerance = rd.positive(b["residual_tolerance"], "residual_tolerance");
  if (b["dense_limit"]) {
    out.dense_limit = rd.scalar<std::ptrdiff_t>(b["dense_limit"], "dense_limit");
    if (out.dense_limit < 1) rd.fail(b["dense_limit"], "dense_limit must be >= 1");
  }
  if (b["fock_tolerance"]) out.fock_tolerance = rd.positive(b["fock_tolerance"], "fock_tolerance");
  if (b["fock_dense_limit"]) {
    out.fock_dense_limit = rd.scalar<std::ptrdiff_t>(b["fock_dense_limit"], "fock_dense_limit");
    if (out.fock_dense_limit < 0) rd.fail(b["fock_dense_limit"], "fock_dense_limit must be >= 0");
  }
  if (b["calibrate"]) out.calibrate = rd.scalar<bool>(b["calibrate"], "calibrate");
}

void read_output(const Reader& rd, const YAML::Node& b, OutputConfig& out) {
  rd.expect_map(b, "output");
  rd.only_keys(b, "output", {"dir", "format", "dump_triplets"});
  if (b["dir"]) out.dir = rd.scalar<std::string>(b["dir"], "dir");
  if (b["format"]) {
    try {
      out.format = parse_format(rd.scalar<std::string>(b["format"], "format"));
    } catch (const ConfigError& e) {
      rd.fail(b["format"], e.what());
    }
  }
  if (b["dump_triplets"]) out.dump_triplets = rd.scalar<bool>(b["dump_triplets"], "dump_triplets");
}

void read_overlaps(const Reader& rd, const YAML::Node& b, OverlapsConfig& out) {
  rd.expect_map(b, "overlaps");
  rd.only_keys(b, "overlaps", {"grid_points", "samples", "seed", "mq", "max_n"});
  if (b["grid_points"]) {
    out.grid_points = rd.scalar<int>(b["grid_points"], "grid_points");
    if (out.grid_points < 1) rd.fail(b["grid_points"], "grid_points must be >= 1");
  }
  if (b["samples"]) {
    out.samples = rd.scalar<int>(b["samples"], "samples");
    if (out.samples < 1) rd.fail(b["samples"], "samples must be >= 1");
  }
  if (b["seed"]) out.seed = rd.scalar<std::uint64_t>(b["seed"], "seed");
  if (b["mq"]) {
    out.mq = rd.scalar<unsigned>(b["mq"], "mq");
    if (out.mq < 2) rd.fail(b["mq"], "mq must be >= 2");
  }
  if (b["max_n"]) out.max_n = rd.scalar<unsigned>(b["max_n"], "max_n");
}

void read_spectrum(const Reader& rd, const YAML::Node& b, SpectrumConfig& out) {
  rd.expect_map(b, "spectrum");
  rd.only_keys(b, "spectrum", {"variant", "count", "epsilons"});
  if (b["variant"]) out.variant = parse_variant(rd, b["variant"]);
  if (b["count"]) out.count = rd.scalar<std::size_t>(b["count"], "count");
  if (b["epsilons"]) out.epsilons = rd.list(b["epsilons"], "epsilons");
}

void read_compare(const Reader& rd, const YAML::Node& b, CompareConfig& out) {
  rd.expect_map(b, "compare");
  rd.only_keys(b, "compare", {"couplings", "hbar2_over_2m"});
  if (b["couplings"]) {
    out.couplings = rd.list(b["couplings"], "couplings");
    for (std::size_t i = 0; i < out.couplings.size(); ++i) {
      if (!(out.couplings[i] > 0.0)) rd.fail(b["couplings"][i], "couplings must be > 0");
    }
  }
  if (b["hbar2_over_2m"]) out.hbar2_over_2m = rd.positive(b["hbar2_over_2m"], "hbar2_over_2m");
}

void read_perturb(const Reader& rd, const YAML::Node& b, PerturbConfig& out) {
  rd.expect_map(b, "perturb");
  rd.only_keys(b, "perturb", {"max_order", "epsilons"});
  if (b["max_order"]) out.max_order = rd.scalar<std::size_t>(b["max_order"], "max_order");
  if (b["epsilons"]) {
    out.epsilons = rd.list(b["epsilons"], "epsilons");
    for (std::size_t i = 0; i < out.epsilons.size(); ++i) {
      if (!(out.epsilons[i] > 0.0)) rd.fail(b["epsilons"][i], "perturbation grid values must be > 0");
    }
  }
}

void read_scan(const Reader& rd, const YAML::Node& b, ScanConfig& out) {
  rd.expect_map(b, "scan");
  rd.only_keys(b, "scan", {"parameter", "values", "variant"});
  if (b["parameter"]) {
    out.parameter = rd.scalar<std::string>(b["parameter"], "parameter");
    if (out.parameter != "epsilon" && out.parameter != "kappa" && out.parameter != "gamma") {
      rd.fail(b["parameter"], "scan parameter must be epsilon, kappa or gamma");
    }
  }
  if (b["values"]) out.values = rd.list(b["values"], "values");
  if (b["variant"]) out.variant = parse_variant(rd, b["variant"]);
  if (out.parameter != "epsilon") {
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      if (!(out.values[i] > 0.0)) rd.fail(b["values"] ? b["values"][i] : b, out.parameter + " values must be > 0");
    }
  }
}

RunConfig from_node(const YAML::Node& root, const std::string& source) {
  const Reader rd(source);
  if (!root || root.IsNull()) throw ConfigError(source + ":1:1: empty configuration");
  rd.expect_map(root, "top level");
  rd.only_keys(root, "top level",
               {"schema_version", "threads", "lattice", "params", "basis", "solver", "output", "overlaps", "spectrum",
                "compare", "perturb", "scan"});
  RunConfig cfg;
  cfg.source = source;
  if (!root["schema_version"]) rd.fail(root, "missing 'schema_version'");
  cfg.schema_version = rd.scalar<int>(root["schema_version"], "schema_version");
  if (cfg.schema_version != kSchemaVersion) {
    rd.fail(root["schema_version"], "unsupported schema_version " + std::to_string(cfg.schema_version) +
                                        " (this build reads " + std::to_string(kSchemaVersion) + ")");
  }
  if (root["threads"]) {
    cfg.threads = rd.scalar<unsigned>(root["threads"], "threads");
    if (cfg.threads < 1) rd.fail(root["threads"], "threads must be >= 1");
  }
  if (root["lattice"]) read_lattice(rd, root["lattice"], cfg.lattice);
  const ModeLattice lattice = cfg.make_lattice();
  if (root["params"]) {
    read_params(rd, root["params"], lattice, cfg);
  } else {
    cfg.params.validate(lattice);
  }
  if (root["basis"]) read_basis(rd, root["basis"], lattice, cfg.basis);
  if (root["solver"]) read_solver(rd, root["solver"], cfg.solver);
  if (root["output"]) read_output(rd, root["output"], cfg.output);
  if (root["overlaps"]) read_overlaps(rd, root["overlaps"], cfg.overlaps);
  if (root["spectrum"]) read_spectrum(rd, root["spectrum"], cfg.spectrum);
  if (root["compare"]) read_compare(rd, root["compare"], cfg.compare);
  if (root["perturb"]) read_perturb(rd, root["perturb"], cfg.perturb);
  if (root["scan"]) read_scan(rd, root["scan"], cfg.scan);

  if (cfg.overlaps.grid_points < cfg.lattice.m_per_dim && root["overlaps"]) {
    rd.fail(root["overlaps"]["grid_points"] ? root["overlaps"]["grid_points"] : root["overlaps"],
            "grid_points (" + std::to_string(cfg.overlaps.grid_points) + ") cannot resolve a lattice with m_per_dim " +
                std::to_string(cfg.lattice.m_per_dim));
  }
  return cfg;
}

}  // namespace

HermiteBasis RunConfig::make_basis(const ModelParams& p) const {
  const ModeLattice lat = make_lattice();
  if (basis.n_max.size() == 1) return {lat, p, basis.n_max.front(), basis.width_factor};
  return {lat, p, basis.n_max, basis.width_factor};
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    Reader(source).fail(e.mark, e.msg);
  }
  return from_node(root, source);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format must be csv or json (got '" + s + "')");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

}  // namespace cfe::app
