#include "cfe/mode_operator.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "cfe/errors.hpp"

namespace cfe {
namespace {

using cd = std::complex<double>;

constexpr double kMatchTolerance = 1e-12;

// Real-coordinate expansion of phi_k or d/dphi_k: up to two (coordinate, weight) terms.
struct LinearForm {
  std::array<std::size_t, 2> coord{};
  std::array<cd, 2> weight{};
};

// phi_k = x + i y (canonical k) or x - i y (partner).
LinearForm field_form(const RealCoordinateMap& map, std::size_t mode) {
  const std::size_t p = map.pair_of(mode);
  const double s = map.is_canonical(mode) ? 1.0 : -1.0;
  return {{2 * p, 2 * p + 1}, {cd(1.0, 0.0), cd(0.0, s)}};
}

// d/dphi_k = (d_x - i d_y)/2 (canonical k) or (d_x + i d_y)/2 (partner).
LinearForm derivative_form(const RealCoordinateMap& map, std::size_t mode) {
  const std::size_t p = map.pair_of(mode);
  const double s = map.is_canonical(mode) ? -0.5 : 0.5;
  return {{2 * p, 2 * p + 1}, {cd(0.5, 0.0), cd(0.0, s)}};
}

// One term W * d/dt_a (t_b t_c .) of the cubic drift in scaled coordinates t = x / sigma.
struct CubicWord {
  std::size_t a;
  std::size_t b;
  std::size_t c;
  double weight;
};

// sum_{k != 0} sum_q q.(k-q) d_k (phi_q phi_{k-q}), reduced to real words. The
// combination is real because the sum is closed under (k, q) -> (-k, -q); the operator
// enters L multiplied by i * epsilon.
std::vector<CubicWord> cubic_words(const ModeLattice& lattice, const HermiteBasis& basis) {
  const auto& map = basis.coordinates();
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, cd> acc;
  const std::size_t zero = lattice.zero_index();
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    if (k == zero) continue;
    const LinearForm dk = derivative_form(map, k);
    for (std::size_t q = 0; q < lattice.size(); ++q) {
      if (q == zero || q == k) continue;
      const auto kq = lattice.combine(k, q, /*subtract=*/true);
      if (!kq || *kq == zero) continue;
      const double weight = lattice.dot(q, *kq);
      if (weight == 0.0) continue;
      const LinearForm fq = field_form(map, q);
      const LinearForm fkq = field_form(map, *kq);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          for (int l = 0; l < 2; ++l) {
            const std::size_t b = std::min(fq.coord[j], fkq.coord[l]);
            const std::size_t c = std::max(fq.coord[j], fkq.coord[l]);
            acc[{dk.coord[i], b, c}] += weight * dk.weight[i] * fq.weight[j] * fkq.weight[l];
          }
        }
      }
    }
  }

  double scale = 0.0;
  for (const auto& [key, w] : acc) scale = std::max(scale, std::abs(w));
  std::vector<CubicWord> words;
  for (const auto& [key, w] : acc) {
    if (std::abs(w.imag()) > 1e-12 * std::max(scale, 1.0)) {
      throw std::logic_error("cubic drift did not reduce to a real operator");
    }
    if (std::abs(w.real()) <= 1e-14 * scale) continue;
    const auto [a, b, c] = key;
    const double sigma_factor = basis.sigma(b) * basis.sigma(c) / basis.sigma(a);
    words.push_back({a, b, c, w.real() * sigma_factor});
  }
  return words;
}

// Per-coordinate OU part k^2 d_x(x .) + D d_x^2 acting on f_n:
//   -n k^2 f_n + (D / sigma^2 - k^2) f_{n+2}.
struct OuCoordinate {
  double k_squared;
  double raise2;
};

std::vector<OuCoordinate> ou_coordinates(const ModelParams& params, const HermiteBasis& basis,
                                         double diffusion_scale, bool& matched) {
  matched = true;
  std::vector<OuCoordinate> out;
  const auto& map = basis.coordinates();
  for (std::size_t c = 0; c < basis.coordinate_count(); ++c) {
    const auto& coord = map.coordinate(c);
    const double diffusion = 0.5 * diffusion_scale * params.gamma_at(coord.mode);
    const double sigma2 = basis.sigma(c) * basis.sigma(c);
    const double ratio = diffusion / (coord.k_squared * sigma2);
    double raise2 = 0.0;
    if (std::abs(ratio - 1.0) > kMatchTolerance) {
      matched = false;
      raise2 = coord.k_squared * (ratio - 1.0);
    }
    out.push_back({coord.k_squared, raise2});
  }
  return out;
}

void check_basis(const ModeLattice& lattice, const HermiteBasis& basis) {
  if (!(basis.lattice() == lattice)) throw ConfigError("basis was built for a different lattice");
}

struct Assembly {
  std::vector<OuCoordinate> ou;
  std::vector<CubicWord> words;
  std::vector<double> potential;  // coefficient of i * d/dt_c
  double epsilon = 0.0;
};

// Column j: L f_n for n = multi_index(j). Real part from the OU ladder, imaginary part
// epsilon * (cubic) + (potential); the two never share an entry (even vs odd degree change).
SparseColumn assemble_column(const HermiteBasis& basis, const Assembly& a, std::size_t j) {
  const std::vector<int> n = basis.multi_index(j);
  std::map<std::size_t, double> re;
  std::map<std::size_t, double> cubic;
  std::map<std::size_t, double> pot;
  std::vector<int> m = n;

  double diag = 0.0;
  for (std::size_t c = 0; c < a.ou.size(); ++c) diag += -static_cast<double>(n[c]) * a.ou[c].k_squared;
  re[j] += diag;
  for (std::size_t c = 0; c < a.ou.size(); ++c) {
    if (a.ou[c].raise2 == 0.0) continue;
    m[c] = n[c] + 2;
    if (basis.contains(m)) re[basis.flat_index(m)] += a.ou[c].raise2;
    m[c] = n[c];
  }

  if (!a.words.empty()) {
    struct Term {
      std::vector<int> degrees;
      double coeff;
    };
    auto multiply = [](const std::vector<Term>& in, std::size_t c) {
      std::vector<Term> out;
      for (const auto& t : in) {
        Term up = t;
        up.degrees[c] += 1;
        out.push_back(std::move(up));
        if (t.degrees[c] > 0) {
          Term down = t;
          down.coeff *= t.degrees[c];
          down.degrees[c] -= 1;
          out.push_back(std::move(down));
        }
      }
      return out;
    };
    for (const auto& w : a.words) {
      std::vector<Term> terms{{n, 1.0}};
      terms = multiply(terms, w.c);
      terms = multiply(terms, w.b);
      for (auto& t : terms) {
        t.degrees[w.a] += 1;  // d/dt f_n = -f_{n+1}
        if (!basis.contains(t.degrees)) continue;
        cubic[basis.flat_index(t.degrees)] += -t.coeff * w.weight;
      }
    }
  }

  for (std::size_t c = 0; c < a.potential.size(); ++c) {
    if (a.potential[c] == 0.0) continue;
    m[c] = n[c] + 1;
    if (basis.contains(m)) pot[basis.flat_index(m)] += -a.potential[c];
    m[c] = n[c];
  }

  std::map<std::size_t, cd> merged;
  for (const auto& [row, v] : re) merged[row] += cd(v, 0.0);
  for (const auto& [row, v] : cubic) merged[row] = cd(merged[row].real(), a.epsilon * v);
  for (const auto& [row, v] : pot) {
    cd& e = merged[row];
    e = cd(e.real(), e.imag() + v);
  }
  SparseColumn column;
  column.reserve(merged.size());
  for (const auto& [row, v] : merged) {
    if (v != cd{}) column.emplace_back(static_cast<std::ptrdiff_t>(row), v);
  }
  return column;
}

OperatorMatrix finish(const ModelParams& params, const ModeLattice& lattice, const HermiteBasis& basis,
                      const Assembly& a, OperatorVariant variant, const AssemblyOptions& options) {
  OperatorMatrix op;
  op.matrix = build_by_columns(basis.dimension(), options.threads,
                               [&](std::size_t j) { return assemble_column(basis, a, j); });
  op.matrix = prune(op.matrix, options.prune_tolerance);
  op.offset = -params.ebar(lattice);
  for (int n : basis.n_max()) op.basis_dims.push_back(static_cast<std::size_t>(n + 1));
  op.variant = variant;
  op.params = params;
  return op;
}

}  // namespace

std::string to_string(OperatorVariant v) {
  switch (v) {
    case OperatorVariant::weak: return "weak";
    case OperatorVariant::full: return "full";
    case OperatorVariant::scaled: return "scaled";
  }
  return "unknown";
}

Eigen::MatrixXcd OperatorMatrix::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd(matrix);
  m.diagonal().array() += offset;
  return m;
}

Eigen::VectorXcd OperatorMatrix::apply(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != matrix.cols()) throw ConfigError("coefficient vector has wrong dimension");
  Eigen::VectorXcd out = matrix * coeffs;
  out += offset * coeffs;
  return out;
}

std::vector<cd> drift_term(std::span<const cd> phi_modes, const ModelParams& params,
                           const ModeLattice& lattice) {
  if (phi_modes.size() != lattice.size()) {
    throw ConfigError("phase mode array does not match the lattice");
  }
  std::vector<cd> drift(lattice.size());
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    cd conv = 0.0;
    for (std::size_t q = 0; q < lattice.size(); ++q) {
      const auto kq = lattice.combine(k, q, /*subtract=*/true);
      if (!kq) continue;
      conv += lattice.dot(q, *kq) * phi_modes[q] * phi_modes[*kq];
    }
    drift[k] = -lattice.k_squared(k) * phi_modes[k] + cd(0.0, 1.0) * (params.u(k) - params.epsilon * conv);
  }
  return drift;
}

OperatorMatrix assemble_weak(const ModelParams& params, const ModeLattice& lattice,
                             const HermiteBasis& basis, const AssemblyOptions& options) {
  params.validate(lattice);
  check_basis(lattice, basis);
  if (!params.constant_potential(lattice)) {
    throw ConfigError("weak-coupling operator requires a uniform potential (u_k = 0 for k != 0)");
  }
  Assembly a;
  bool matched = false;
  a.ou = ou_coordinates(params, basis, 1.0, matched);
  if (!matched) {
    throw ConfigError("basis widths are not matched to gamma; the weak operator would not be diagonal");
  }
  return finish(params, lattice, basis, a, OperatorVariant::weak, options);
}

OperatorMatrix assemble_full(const ModelParams& params, const ModeLattice& lattice,
                             const HermiteBasis& basis, const AssemblyOptions& options) {
  params.validate(lattice);
  check_basis(lattice, basis);
  Assembly a;
  bool matched = false;
  a.ou = ou_coordinates(params, basis, 1.0, matched);
  a.epsilon = params.epsilon;
  a.words = cubic_words(lattice, basis);
  const auto& map = basis.coordinates();
  a.potential.assign(basis.coordinate_count(), 0.0);
  for (std::size_t c = 0; c < basis.coordinate_count(); ++c) {
    const cd u = params.u(map.coordinate(c).mode);
    a.potential[c] = -(map.coordinate(c).imaginary ? u.imag() : u.real()) / basis.sigma(c);
  }
  OperatorMatrix op = finish(params, lattice, basis, a, OperatorVariant::full, options);
  for (std::size_t c = 0; c < basis.coordinate_count(); ++c) {
    if (basis.n_max(c) < 2) {
      op.warnings.push_back("coordinate " + std::to_string(c) + " has n_max < 2; the cubic drift is truncated");
      break;
    }
  }
  if (!matched) op.warnings.push_back("basis widths are not matched to gamma; OU part is not diagonal");
  return op;
}

ScaledCoefficients scaled_coefficients(const ModelParams& params) {
  if (!(params.kappa > 0.0)) throw ConfigError("kappa must be positive");
  return {std::pow(params.kappa, params.p_exp), std::pow(params.kappa, params.q_exp - params.p_exp),
          std::pow(params.kappa, 1.0 - 2.0 * params.p_exp)};
}

ModelParams scaled_params(const ModelParams& params) {
  const ScaledCoefficients s = scaled_coefficients(params);
  ModelParams out = params;
  out.epsilon = s.gradient;
  for (auto& u : out.u_k) u *= s.potential;
  out.gamma *= s.diffusion;
  for (auto& g : out.gamma_k) g *= s.diffusion;
  return out;
}

OperatorMatrix scaled_operator(const ModelParams& params, const HermiteBasis& basis,
                               const AssemblyOptions& options) {
  OperatorMatrix op = assemble_full(scaled_params(params), basis.lattice(), basis, options);
  op.variant = OperatorVariant::scaled;
  return op;
}

OperatorMatrix cubic_perturbation(const ModelParams& params, const ModeLattice& lattice,
                                  const HermiteBasis& basis, const AssemblyOptions& options) {
  ModelParams p0 = params;
  p0.epsilon = 0.0;
  ModelParams p1 = params;
  p1.epsilon = 1.0;
  OperatorMatrix op1 = assemble_full(p1, lattice, basis, options);
  const OperatorMatrix op0 = assemble_full(p0, lattice, basis, options);
  op1.matrix = prune(SparseMatrixC(op1.matrix - op0.matrix), options.prune_tolerance);
  op1.offset = 0.0;
  return op1;
}

Eigen::VectorXcd gaussian_ground_coeffs(const ModelParams& params, const HermiteBasis& basis) {
  const auto& map = basis.coordinates();
  std::vector<std::vector<double>> per_coord;
  bool matched = true;
  for (std::size_t c = 0; c < basis.coordinate_count(); ++c) {
    const auto& coord = map.coordinate(c);
    const double target = params.gamma_at(coord.mode) / (2.0 * coord.k_squared);
    const double ratio = target / (basis.sigma(c) * basis.sigma(c));
    if (std::abs(ratio - 1.0) > kMatchTolerance) matched = false;
    per_coord.push_back(gaussian_coefficients(ratio, basis.n_max(c)));
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension()));
  if (matched) {
    v(0) = 1.0;
    return v;
  }
  for (std::size_t j = 0; j < basis.dimension(); ++j) {
    const auto n = basis.multi_index(j);
    double value = 1.0;
    for (std::size_t c = 0; c < n.size(); ++c) value *= per_coord[c][static_cast<std::size_t>(n[c])];
    v(static_cast<Eigen::Index>(j)) = value;
  }
  return v;
}

}  // namespace cfe
