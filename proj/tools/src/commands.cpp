#include "cfe_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "cfe/coherent.hpp"
#include "cfe/errors.hpp"
#include "cfe/fock.hpp"
#include "cfe/mode_operator.hpp"
#include "cfe/spectral.hpp"

namespace cfe::app {

namespace {

using cd = std::complex<double>;
constexpr double kEps = std::numeric_limits<double>::epsilon();

Check make_check(std::string name, double value, double tolerance, std::string note = {}, bool gating = true) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tolerance;
  c.passed = std::isfinite(value) && value <= tolerance;
  c.gating = gating;
  c.note = std::move(note);
  return c;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

void require_dense(const RunConfig& cfg) {
  if (cfg.solver.method == "iterative") {
    throw ConfigError(cfg.solver.method_location +
                      ": the iterative solver only covers the Hermitian Fock problem; non-Hermitian spectra need "
                      "method: dense");
  }
}

EigenOptions eigen_options(const RunConfig& cfg) {
  EigenOptions o;
  o.residual_tolerance = cfg.solver.residual_tolerance;
  o.dense_limit = cfg.solver.dense_limit;
  return o;
}

FockSolverOptions fock_options(const RunConfig& cfg) {
  FockSolverOptions o;
  o.tolerance = cfg.solver.fock_tolerance;
  o.dense_limit = cfg.solver.method == "iterative" ? 0 : cfg.solver.fock_dense_limit;
  return o;
}

// Parameters that fix the basis widths: the scaled variant rescales gamma.
ModelParams basis_params(const ModelParams& p, OperatorVariant v) {
  return v == OperatorVariant::scaled ? scaled_params(p) : p;
}

OperatorMatrix assemble(OperatorVariant v, const ModelParams& p, const ModeLattice& lat, const HermiteBasis& basis,
                        unsigned threads) {
  const AssemblyOptions opts{.threads = threads};
  switch (v) {
    case OperatorVariant::weak:
      return assemble_weak(p, lat, basis, opts);
    case OperatorVariant::full:
      return assemble_full(p, lat, basis, opts);
    case OperatorVariant::scaled:
      return scaled_operator(p, basis, opts);
  }
  throw std::logic_error("unknown operator variant");
}

void append_warnings(Report& r, const std::vector<std::string>& w) {
  for (const auto& s : w) {
    if (std::find(r.warnings.begin(), r.warnings.end(), s) == r.warnings.end()) r.warnings.push_back(s);
  }
}

std::string triplets(const OperatorMatrix& op) {
  std::ostringstream s;
  write_triplets(s, op.matrix, op.offset);
  return s.str();
}

// Eigenvalues -sum_c n_c k_c^2 - ebar of the weak operator on this basis.
std::vector<cd> ladder_oracle(const HermiteBasis& basis, double ebar) {
  std::vector<cd> out;
  out.reserve(basis.dimension());
  for (std::size_t j = 0; j < basis.dimension(); ++j) {
    const auto n = basis.multi_index(j);
    double e = -ebar;
    for (std::size_t c = 0; c < n.size(); ++c) e -= n[c] * basis.coordinates().coordinate(c).k_squared;
    out.emplace_back(e, 0.0);
  }
  return out;
}

}  // namespace

Report cmd_overlaps(const RunConfig& cfg) {
  Report rep;
  rep.command = "overlaps";
  const auto& oc = cfg.overlaps;
  const SpatialGrid grid(cfg.lattice.d, cfg.lattice.box_len, oc.grid_points);
  std::mt19937_64 rng(oc.seed);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);

  std::vector<CoherentField> fields;
  for (int s = 0; s < oc.samples; ++s) {
    std::vector<double> ph(grid.size());
    for (auto& x : ph) x = phase(rng);
    fields.push_back(CoherentField::from_grid(grid, cfg.r, std::move(ph)));
  }

  // Pairwise identities on consecutive samples.
  Table pairs{"overlaps", {"pair", "re_g", "im_g", "re_value", "im_value", "hermitian_error"}, {}};
  double herm = 0.0, norm_err = 0.0;
  const double self_value = std::exp(cfg.r * cfg.r * grid.volume());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& a = fields[i];
    const auto& b = fields[(i + 1) % fields.size()];
    const auto ab = overlap(a, b);
    const auto ba = overlap(b, a);
    const double h = std::abs(ab.value - std::conj(ba.value)) / std::abs(ab.value);
    herm = std::max(herm, h);
    norm_err = std::max(norm_err, std::abs(overlap(a, a).value - self_value) / self_value);
    pairs.rows.push_back({static_cast<std::int64_t>(i), ab.g.real(), ab.g.imag(), ab.value.real(), ab.value.imag(), h});
  }
  rep.tables.push_back(std::move(pairs));
  rep.checks.push_back(make_check("overlap_hermitian_symmetry", herm, 1e-14));
  rep.checks.push_back(make_check("self_overlap_equals_exp_r2v", norm_err, 1e-12));

  // Gram matrix of the first few states, normalised, must be positive semidefinite.
  const std::size_t gram_n = std::min<std::size_t>(fields.size(), 12);
  Eigen::MatrixXcd gram = kernel_gram(std::span<const CoherentField>(fields.data(), gram_n));
  const Eigen::VectorXd d = gram.diagonal().real().cwiseSqrt().cwiseInverse();
  gram = d.asDiagonal() * gram * d.asDiagonal();
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram).eigenvalues().minCoeff();
  rep.checks.push_back(make_check("gram_min_eigenvalue_nonnegative", -min_eig, 1e-12));

  // Number projection of the first pair.
  const cd g = exponent_g(fields[0], fields[fields.size() > 1 ? 1 : 0]);
  Table proj{"projection",
             {"n", "re_closed", "im_closed", "re_quadrature", "im_quadrature", "abs_error", "tail_bound"},
             {}};
  double proj_err = 0.0, tail_excess = 0.0;
  for (unsigned n = 0; n <= oc.max_n; ++n) {
    const cd closed = projected_power(g, n);
    const cd quad = projected_quadrature(g, n, oc.mq);
    const double err = std::abs(quad - closed);
    const double bound = aliasing_tail_bound(std::abs(g), n, oc.mq);
    // Round-off of an mq-term sum of magnitude <= exp|G|.
    const double roundoff = 4.0 * oc.mq * kEps * std::exp(std::abs(g));
    proj_err = std::max(proj_err, err);
    tail_excess = std::max(tail_excess, err - bound - roundoff);
    proj.rows.push_back({static_cast<std::int64_t>(n), closed.real(), closed.imag(), quad.real(), quad.imag(), err, bound});
  }
  rep.tables.push_back(std::move(proj));
  rep.checks.push_back(make_check("projection_quadrature_vs_closed", proj_err, 1e-10));
  rep.checks.push_back(make_check("projection_error_within_tail_bound", std::max(tail_excess, 0.0), 0.0));
  rep.checks.push_back(make_check("projection_n0_is_one", std::abs(projected_power(g, 0) - 1.0), 0.0));

  // Sector orthogonality: projecting the N' component onto N != N'.
  double cross = 0.0;
  for (unsigned n = 0; n <= oc.max_n; ++n) {
    for (unsigned np = 0; np <= oc.max_n; ++np) {
      if (n == np) continue;
      const cd gp = projected_power(g, np);
      const auto f = [&](double th) { return gp * std::polar(1.0, th * np); };
      cross = std::max(cross, std::abs(phase_projection(f, n, oc.mq)));
    }
  }
  rep.checks.push_back(make_check("cross_sector_orthogonality", cross, 1e-12));

  // Sum over sectors restores the full overlap.
  cd total = 0.0;
  for (unsigned n = 0; n < 200; ++n) total += projected_power(g, n);
  rep.checks.push_back(make_check("sector_sum_equals_overlap", std::abs(total - std::exp(g)) / std::abs(std::exp(g)), 1e-12));

  // A band-limited field built from the lattice modes must come back from its DFT.
  const ModeLattice lat = cfg.make_lattice();
  std::vector<cd> modes(lat.size());
  std::normal_distribution<double> gauss(0.0, 0.3);
  for (std::size_t k = 0; k <= lat.zero_index(); ++k) {
    modes[k] = k == lat.zero_index() ? cd(gauss(rng), 0.0) : cd(gauss(rng), gauss(rng));
    modes[lat.negated(k)] = std::conj(modes[k]);
  }
  const auto field = CoherentField::from_modes(grid, cfg.r, lat, modes);
  const auto dft = field.dft_modes();
  double mode_err = 0.0;
  for (std::size_t k = 0; k < lat.size(); ++k) {
    std::size_t flat = 0;
    for (int n : lat.label(k)) {
      flat = flat * static_cast<std::size_t>(oc.grid_points) +
             static_cast<std::size_t>(((n % oc.grid_points) + oc.grid_points) % oc.grid_points);
    }
    mode_err = std::max(mode_err, std::abs(dft[flat] - modes[k]));
  }
  rep.checks.push_back(make_check("lattice_modes_roundtrip", mode_err, 1e-12));
  return rep;
}

Report cmd_spectrum(const RunConfig& cfg) {
  require_dense(cfg);
  Report rep;
  rep.command = "spectrum";
  const auto& sc = cfg.spectrum;
  const ModeLattice lat = cfg.make_lattice();
  ModelParams p = cfg.params;
  const HermiteBasis basis = cfg.make_basis(basis_params(p, sc.variant));
  const EigenOptions eo = eigen_options(cfg);
  if (cfg.solver.calibrate) p.set_u0(lat, calibrate_mu(p, lat, basis, sc.variant, eo));

  const OperatorMatrix op = assemble(sc.variant, p, lat, basis, cfg.threads);
  append_warnings(rep, op.warnings);
  const auto pairs = eigen_spectrum(op, sc.count, eo);

  Table spec{"spectrum", {"index", "re", "im", "residual"}, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    spec.rows.push_back({static_cast<std::int64_t>(i), pairs[i].eigenvalue.real(), pairs[i].eigenvalue.imag(),
                         pairs[i].residual});
    worst = std::max(worst, pairs[i].residual);
  }
  rep.tables.push_back(std::move(spec));
  rep.checks.push_back(make_check("eigenpair_residual", worst, eo.residual_tolerance));

  Table ground{"ground_state", {"index", "degrees", "re", "im"}, {}};
  if (!pairs.empty()) {
    const auto& v = pairs.front().right;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      ground.rows.push_back({static_cast<std::int64_t>(j), join(basis.multi_index(static_cast<std::size_t>(j))),
                             v(j).real(), v(j).imag()});
    }
  }
  rep.tables.push_back(std::move(ground));
  if (cfg.output.dump_triplets) rep.attachments.push_back({"operator.triplets", triplets(op)});

  if (sc.variant == OperatorVariant::weak) {
    const auto all = eigenvalues(op, eo);
    const double ladder = multiset_distance(all, ladder_oracle(basis, p.ebar(lat)));
    rep.checks.push_back(make_check("weak_spectrum_equals_ladder", ladder, 1e-12));
    const auto psi = gaussian_ground_coeffs(p, basis);
    rep.checks.push_back(
        make_check("gaussian_ground_state_residual", (op.apply(psi) + p.ebar(lat) * psi).norm(), 1e-12));
  }

  if (!sc.epsilons.empty()) {
    if (sc.variant != OperatorVariant::full) {
      throw ConfigError(cfg.source + ": spectrum.epsilons needs spectrum.variant: full");
    }
    Table conj{"conjugate_pairs", {"epsilon", "index", "re_plus", "im_plus", "re_minus", "im_minus"}, {}};
    double entry = 0.0, spectra = 0.0;
    for (double eps : sc.epsilons) {
      ModelParams pp = p, pm = p;
      pp.epsilon = eps;
      pm.epsilon = -eps;
      const auto plus = assemble_full(pp, lat, basis, {.threads = cfg.threads});
      const auto minus = assemble_full(pm, lat, basis, {.threads = cfg.threads});
      entry = std::max(entry, max_abs(SparseMatrixC(minus.matrix - SparseMatrixC(plus.matrix.conjugate()))));
      const auto ev_p = eigenvalues(plus, eo);
      const auto ev_m = eigenvalues(minus, eo);
      spectra = std::max(spectra, conjugate_multiset_distance(ev_p, ev_m));
      for (std::size_t i = 0; i < std::min(ev_p.size(), sc.count); ++i) {
        conj.rows.push_back({eps, static_cast<std::int64_t>(i), ev_p[i].real(), ev_p[i].imag(), ev_m[i].real(),
                             ev_m[i].imag()});
      }
    }
    rep.tables.push_back(std::move(conj));
    rep.checks.push_back(make_check("matrix_minus_eps_is_conjugate", entry, 0.0));
    rep.checks.push_back(make_check("spectra_conjugate_multisets", spectra, 1e-9));
  }
  return rep;
}

Report cmd_compare(const RunConfig& cfg) {
  Report rep;
  rep.command = "compare";
  const auto& cc = cfg.compare;
  const ModeLattice lat = cfg.make_lattice();
  const int n = cfg.params.n_particles;
  if (n < 1) throw ConfigError(cfg.source + ": compare needs params.n_particles >= 1");
  std::vector<double> couplings;
  for (double c : cc.couplings) couplings.push_back(c * cc.hbar2_over_2m / lat.volume());
  std::sort(couplings.begin(), couplings.end(), std::greater<>());
  const auto rows = mean_field_comparison(lat, n, couplings, cc.hbar2_over_2m, fock_options(cfg));

  Table t{"compare",
          {"coupling", "oracle_e_per_n", "prediction_e_per_n", "relative_deviation", "textbook_e_per_n",
           "textbook_relative_deviation", "functional_e_per_n", "functional_relative_mismatch",
           "condensate_e_per_n"},
          {}};
  double mismatch = 0.0, bound = -std::numeric_limits<double>::infinity();
  int rises = 0, textbook_rises = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    t.rows.push_back({r.coupling, r.oracle_energy_per_particle, r.prediction_per_particle, r.relative_deviation,
                      r.textbook_energy_per_particle, r.textbook_relative_deviation, r.functional_energy_per_particle,
                      r.functional_relative_mismatch, r.condensate_energy / n});
    mismatch = std::max(mismatch, r.functional_relative_mismatch);
    bound = std::max(bound, r.oracle_energy - r.condensate_energy);
    if (i > 0) {
      if (!(std::abs(r.relative_deviation) < std::abs(rows[i - 1].relative_deviation))) ++rises;
      if (!(std::abs(r.textbook_relative_deviation) < std::abs(rows[i - 1].textbook_relative_deviation))) {
        ++textbook_rises;
      }
    }
  }
  rep.tables.push_back(std::move(t));
  rep.checks.push_back(make_check("functional_prediction_exact", mismatch, 4.0 * kEps));
  rep.checks.push_back(make_check("variational_bound", std::max(bound, 0.0), 0.0));
  rep.checks.push_back(make_check("deviation_decreases_with_coupling", rises, 0.0,
                                  "count of scan steps where |relative deviation| fails to shrink"));
  rep.checks.push_back(make_check("textbook_deviation_decreases_with_coupling", textbook_rises, 0.0,
                                  "normal-ordered interaction, diagnostic only", false));

  // Hermiticity of the oracle at the strongest coupling.
  const std::vector<double> uk(lat.size(), couplings.front());
  FockOptions fo;
  fo.hbar2_over_2m = cc.hbar2_over_2m;
  fo.threads = cfg.threads;
  const auto h = build_hamiltonian(lat, uk, 0.0, 0.0, enumerate_basis(lat.size(), n), fo);
  const double herm = max_abs(SparseMatrixC(h.matrix - SparseMatrixC(h.matrix.adjoint())));
  rep.checks.push_back(make_check("fock_hermitian", herm, 1e-13 * max_abs(h.matrix)));
  if (cfg.output.dump_triplets) {
    std::ostringstream s;
    write_triplets(s, h.matrix, 0.0);
    rep.attachments.push_back({"fock.triplets", s.str()});
  }
  return rep;
}

Report cmd_perturb(const RunConfig& cfg) {
  require_dense(cfg);
  Report rep;
  rep.command = "perturb";
  const auto& pc = cfg.perturb;
  const ModeLattice lat = cfg.make_lattice();
  ModelParams p = cfg.params;
  const HermiteBasis basis = cfg.make_basis(p);
  const EigenOptions eo = eigen_options(cfg);
  if (cfg.solver.calibrate) p.set_u0(lat, calibrate_mu(p, lat, basis, OperatorVariant::weak, eo));

  ModelParams p0 = p;
  p0.epsilon = 0.0;
  const auto op0 = assemble_full(p0, lat, basis, {.threads = cfg.threads});
  const auto op1 = cubic_perturbation(p, lat, basis, {.threads = cfg.threads});
  append_warnings(rep, op0.warnings);
  const auto series = perturbation_series(op0, op1, pc.max_order, eo);

  Table st{"series", {"order", "re", "im"}, {}};
  for (std::size_t j = 0; j < series.orders.size(); ++j) {
    st.rows.push_back({static_cast<std::int64_t>(j), series.orders[j].real(), series.orders[j].imag()});
  }
  rep.tables.push_back(std::move(st));

  Table dev{"deviation",
            {"epsilon", "direct_re", "direct_im", "series_re", "series_im", "abs_deviation", "order2_residual"},
            {}};
  std::vector<double> eps, resid, resid2;
  for (double e : pc.epsilons) {
    ModelParams pe = p;
    pe.epsilon = e;
    const cd direct = ground_state(assemble_full(pe, lat, basis, {.threads = cfg.threads}), eo).eigenvalue;
    const cd approx = series.evaluate(e, pc.max_order);
    const double r2 = std::abs(direct - series.evaluate(e, 2));
    dev.rows.push_back({e, direct.real(), direct.imag(), approx.real(), approx.imag(), std::abs(direct - approx), r2});
    eps.push_back(e);
    resid.push_back(std::abs(direct - approx));
    resid2.push_back(r2);
  }
  rep.tables.push_back(std::move(dev));

  if (series.orders.size() > 1) {
    const bool constant = p.constant_potential(lat);
    rep.checks.push_back(make_check("first_order_vanishes", std::abs(series.orders[1]), 1e-12,
                                    constant ? "" : "potential is not uniform; diagnostic only", constant));
  }
  // Odd orders vanish by the phi -> -phi symmetry, so the first omitted order is the
  // next even one.
  const auto expected = [](std::size_t j) { return static_cast<double>(j % 2 ? j + 1 : j + 2); };
  const auto slope_check = [&](const std::string& name, const std::vector<double>& r, std::size_t order) {
    const double peak = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    const double slope = r.size() >= 2 ? loglog_slope(eps, r) : std::numeric_limits<double>::quiet_NaN();
    std::string note = "expected slope " + format_double(expected(order)) + "; max residual " + format_double(peak);
    if (!std::isfinite(slope)) note += "; residual vanishes at some grid point, no power law to fit";
    Check c = make_check(name, std::abs(slope - expected(order)), 0.5, note);
    rep.checks.push_back(c);
  };
  if (pc.max_order >= 2) slope_check("order2_residual_loglog_slope", resid2, 2);
  slope_check("series_residual_loglog_slope", resid, pc.max_order);
  return rep;
}

Report cmd_scan(const RunConfig& cfg) {
  require_dense(cfg);
  Report rep;
  rep.command = "scan";
  const auto& sc = cfg.scan;
  const ModeLattice lat = cfg.make_lattice();
  const EigenOptions eo = eigen_options(cfg);

  Table t{"scan", {"value", "u0", "ground_re", "ground_im", "second_re", "second_im", "gap", "residual"}, {}};
  std::map<double, cd> ground_by_value;
  double worst = 0.0;
  for (double v : sc.values) {
    ModelParams p = cfg.params;
    if (sc.parameter == "epsilon") p.epsilon = v;
    if (sc.parameter == "kappa") p.kappa = v;
    if (sc.parameter == "gamma") p.gamma = v;
    p.validate(lat);
    const HermiteBasis basis = cfg.make_basis(basis_params(p, sc.variant));
    if (cfg.solver.calibrate) p.set_u0(lat, calibrate_mu(p, lat, basis, sc.variant, eo));
    const auto op = assemble(sc.variant, p, lat, basis, cfg.threads);
    append_warnings(rep, op.warnings);
    const auto pairs = eigen_spectrum(op, 2, eo);
    const cd g0 = pairs[0].eigenvalue;
    const cd g1 = pairs.size() > 1 ? pairs[1].eigenvalue : cd(std::numeric_limits<double>::quiet_NaN());
    worst = std::max(worst, pairs[0].residual);
    ground_by_value[v] = g0;
    t.rows.push_back({v, p.u0(lat), g0.real(), g0.imag(), g1.real(), g1.imag(), g0.real() - g1.real(),
                      pairs[0].residual});
  }
  rep.tables.push_back(std::move(t));
  rep.checks.push_back(make_check("ground_residual", worst, eo.residual_tolerance));
  if (sc.parameter == "epsilon") {
    double asym = 0.0;
    bool any = false;
    for (const auto& [v, g] : ground_by_value) {
      if (v <= 0.0) continue;
      const auto it = ground_by_value.find(-v);
      if (it == ground_by_value.end()) continue;
      any = true;
      asym = std::max(asym, std::abs(it->second - std::conj(g)));
    }
    if (any) rep.checks.push_back(make_check("ground_conjugate_under_epsilon_sign", asym, 1e-9));
  }
  return rep;
}

Report run_command(const std::string& name, const RunConfig& config) {
  if (name == "overlaps") return cmd_overlaps(config);
  if (name == "spectrum") return cmd_spectrum(config);
  if (name == "compare") return cmd_compare(config);
  if (name == "perturb") return cmd_perturb(config);
  if (name == "scan") return cmd_scan(config);
  throw ConfigError("unknown command '" + name + "'");
}

}  // namespace cfe::app
