#include "cfe/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "cfe/errors.hpp"
#include "cfe/hermite.hpp"
#include "cfe/mode_operator.hpp"
#include "cfe/spectral.hpp"

namespace cfe {
namespace {

using cd = std::complex<double>;

// A basis state being acted on by ladder operators. The amplitude is kept squared as
// a product of occupation integers, so sqrt(n) * sqrt(n) comes out as exactly n.
struct Ket {
  std::vector<int> occ;
  double amp_sq;

  double amp() const { return std::sqrt(amp_sq); }
};

// a_slot |ket>; returns false when the mode is empty.
bool annihilate(Ket& k, std::size_t slot) {
  if (k.occ[slot] == 0) return false;
  k.amp_sq *= static_cast<double>(k.occ[slot]);
  --k.occ[slot];
  return true;
}

void create(Ket& k, std::size_t slot) {
  ++k.occ[slot];
  k.amp_sq *= static_cast<double>(k.occ[slot]);
}

struct SlotMap {
  std::vector<std::size_t> label;                    // slot -> lattice index
  std::vector<std::optional<std::size_t>> slot_of;   // lattice index -> slot
};

SlotMap make_slots(const ModeLattice& lattice, std::span<const std::size_t> labels, std::size_t modes) {
  SlotMap s;
  if (labels.empty()) {
    s.label.resize(modes);
    std::iota(s.label.begin(), s.label.end(), std::size_t{0});
  } else {
    s.label.assign(labels.begin(), labels.end());
  }
  if (s.label.size() != lattice.size() || modes != lattice.size()) {
    throw ConfigError("Fock basis has " + std::to_string(modes) + " modes, lattice has " +
                      std::to_string(lattice.size()));
  }
  s.slot_of.assign(lattice.size(), std::nullopt);
  for (std::size_t m = 0; m < s.label.size(); ++m) {
    if (s.label[m] >= lattice.size() || s.slot_of[s.label[m]]) {
      throw ConfigError("mode labels must be a permutation of the lattice modes");
    }
    s.slot_of[s.label[m]] = m;
  }
  return s;
}

// n_k |in> with n_k = sum_q a+_q a_{q+k} (terms with q+k off the lattice dropped).
std::vector<Ket> density_component(const std::vector<Ket>& in, std::size_t k, const ModeLattice& lattice,
                                   const SlotMap& slots) {
  std::vector<Ket> out;
  for (const Ket& ket : in) {
    for (std::size_t q = 0; q < lattice.size(); ++q) {
      const auto src = lattice.combine(q, k);
      if (!src) continue;
      Ket next = ket;
      if (!annihilate(next, *slots.slot_of[*src])) continue;
      create(next, *slots.slot_of[q]);
      out.push_back(std::move(next));
    }
  }
  return out;
}

}  // namespace

double FockBasis::sector_size(std::size_t modes, int n_particles) {
  if (modes == 0) return n_particles == 0 ? 1.0 : 0.0;
  // C(N + M - 1, N) by the multiplicative formula; every partial product is an
  // integer, so the result is exact while it stays below 2^53.
  double c = 1.0;
  for (int i = 1; i <= n_particles; ++i) c = c * (static_cast<double>(modes) - 1.0 + i) / i;
  return c;
}

std::size_t FockBasis::count_with(int particles, std::size_t free_modes) const {
  if (particles < 0) return 0;
  return ways_[static_cast<std::size_t>(particles)][free_modes];
}

std::optional<std::size_t> FockBasis::index_of(std::span<const int> occupation) const {
  if (occupation.size() != modes_) return std::nullopt;
  int remaining = n_;
  std::size_t index = 0;
  for (std::size_t i = 0; i < modes_; ++i) {
    const int v = occupation[i];
    if (v < 0 || v > remaining) return std::nullopt;
    if (i + 1 == modes_) {
      if (v != remaining) return std::nullopt;
      break;
    }
    for (int larger = v + 1; larger <= remaining; ++larger) index += count_with(remaining - larger, modes_ - i - 1);
    remaining -= v;
  }
  return index;
}

FockBasis enumerate_basis(std::size_t m_modes, int n_particles) {
  if (m_modes < 1) throw ConfigError("Fock basis needs at least one mode");
  if (n_particles < 0) throw ConfigError("particle number must be non-negative");
  if (FockBasis::sector_size(m_modes, n_particles) > static_cast<double>(FockBasis::kMaxStates) + 0.5) {
    throw ConfigError("Fock sector with " + std::to_string(m_modes) + " modes and " + std::to_string(n_particles) +
                      " particles exceeds " + std::to_string(FockBasis::kMaxStates) + " states");
  }
  FockBasis b;
  b.modes_ = m_modes;
  b.n_ = n_particles;
  const auto n = static_cast<std::size_t>(n_particles);
  b.ways_.assign(n + 1, std::vector<std::size_t>(m_modes + 1, 0));
  for (std::size_t r = 0; r <= n; ++r) {
    b.ways_[r][0] = r == 0 ? 1 : 0;
    for (std::size_t f = 1; f <= m_modes; ++f) {
      // ways(r, f) = sum_{v=0}^{r} ways(r - v, f - 1)
      std::size_t total = 0;
      for (std::size_t v = 0; v <= r; ++v) total += b.ways_[r - v][f - 1];
      b.ways_[r][f] = total;
    }
  }
  b.count_ = b.ways_[n][m_modes];
  b.occupations_.reserve(b.count_ * m_modes);

  std::vector<int> s(m_modes, 0);
  s[0] = n_particles;
  for (std::size_t i = 0; i < b.count_; ++i) {
    b.occupations_.insert(b.occupations_.end(), s.begin(), s.end());
    // Next state in decreasing lexicographic order.
    std::size_t pos = m_modes;
    for (std::size_t j = m_modes - 1; j-- > 0;) {
      if (s[j] > 0) {
        pos = j;
        break;
      }
    }
    if (pos == m_modes) break;
    int tail = 0;
    for (std::size_t j = pos + 1; j < m_modes; ++j) {
      tail += s[j];
      s[j] = 0;
    }
    --s[pos];
    s[pos + 1] = tail + 1;
  }
  return b;
}

FockHamiltonian build_hamiltonian(const ModeLattice& lattice, std::span<const double> u_int_k, double u0_ext,
                                  double mu, const FockBasis& basis, const FockOptions& options) {
  if (u_int_k.size() != lattice.size()) {
    throw ConfigError("interaction array has " + std::to_string(u_int_k.size()) + " entries, lattice has " +
                      std::to_string(lattice.size()));
  }
  for (std::size_t i = 0; i < u_int_k.size(); ++i) {
    if (u_int_k[lattice.negated(i)] != u_int_k[i]) {
      throw ConfigError("interaction U_k must be even in k for a real potential");
    }
  }
  if (!(options.hbar2_over_2m > 0.0)) throw ConfigError("hbar^2/(2m) must be positive");
  const SlotMap slots = make_slots(lattice, options.mode_labels, basis.mode_count());
  const double volume = lattice.volume();
  const double h = options.hbar2_over_2m;
  const double n_total = basis.n_particles();

  auto column = [&](std::size_t j) {
    std::map<std::size_t, double> acc;
    const auto s = basis.state(j);
    double diag = (u0_ext - mu) * n_total;
    for (std::size_t m = 0; m < s.size(); ++m) diag += h * lattice.k_squared(slots.label[m]) * s[m];
    acc[j] += diag;

    const Ket start{std::vector<int>(s.begin(), s.end()), 1.0};
    auto deposit = [&](const std::vector<Ket>& kets, double weight) {
      for (const Ket& k : kets) {
        const auto row = basis.index_of(k.occ);
        if (!row) throw std::logic_error("Fock operator left the N-particle sector");
        acc[*row] += weight * k.amp();
      }
    };

    for (std::size_t k = 0; k < lattice.size(); ++k) {
      if (u_int_k[k] == 0.0) continue;
      if (options.form == InteractionForm::density_density) {
        const std::size_t minus_k = lattice.negated(k);
        const auto once = density_component({start}, minus_k, lattice, slots);
        deposit(density_component(once, k, lattice, slots), u_int_k[k] / volume);
      } else {
        std::vector<Ket> kets;
        for (std::size_t p = 0; p < lattice.size(); ++p) {
          const auto pk = lattice.combine(p, k);
          if (!pk) continue;
          for (std::size_t q = 0; q < lattice.size(); ++q) {
            const auto qk = lattice.combine(q, k, /*subtract=*/true);
            if (!qk) continue;
            Ket next = start;
            if (!annihilate(next, *slots.slot_of[p])) continue;
            if (!annihilate(next, *slots.slot_of[q])) continue;
            create(next, *slots.slot_of[*qk]);
            create(next, *slots.slot_of[*pk]);
            kets.push_back(std::move(next));
          }
        }
        deposit(kets, 0.5 * u_int_k[k] / volume);
      }
    }

    SparseColumn col;
    for (const auto& [row, v] : acc) {
      if (v != 0.0) col.emplace_back(static_cast<std::ptrdiff_t>(row), cd(v, 0.0));
    }
    return col;
  };

  FockHamiltonian out;
  out.matrix = build_by_columns(basis.size(), options.threads, column);
  out.u_int_k.assign(u_int_k.begin(), u_int_k.end());
  out.u0_ext = u0_ext;
  out.mu = mu;
  out.hbar2_over_2m = h;
  out.form = options.form;
  out.mode_labels = slots.label;
  return out;
}

FockGround ground_state(const FockHamiltonian& h, const FockSolverOptions& options) {
  const auto n = h.matrix.rows();
  if (n == 0) throw SolverError("empty Fock Hamiltonian");
  const double scale = std::max(max_abs(h.matrix), 1e-300);
  FockGround g;
  if (n <= options.dense_limit) {
    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(h.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
    if (solver.info() != Eigen::Success) throw SolverError("dense Hermitian solve failed");
    g.energy = solver.eigenvalues()(0);
    g.vector = solver.eigenvectors().col(0);
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXcd start(n);
    for (Eigen::Index i = 0; i < n; ++i) start(i) = uni(rng);
    start.normalize();
    bool converged = false;
    for (int restart = 0; restart <= options.max_restarts && !converged; ++restart) {
      const int kdim = static_cast<int>(std::min<std::ptrdiff_t>(options.krylov_dim, n));
      Eigen::MatrixXcd basis(n, kdim);
      std::vector<double> alpha;
      std::vector<double> beta;
      basis.col(0) = start;
      int used = 0;
      for (int j = 0; j < kdim; ++j) {
        Eigen::VectorXcd w = h.matrix * basis.col(j);
        alpha.push_back(basis.col(j).dot(w).real());
        used = j + 1;
        for (int pass = 0; pass < 2; ++pass) {
          const Eigen::VectorXcd proj = basis.leftCols(used).adjoint() * w;
          w -= basis.leftCols(used) * proj;
        }
        const double b = w.norm();
        if (j + 1 == kdim || b < 1e-14 * scale) break;
        beta.push_back(b);
        basis.col(j + 1) = w / b;
      }
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(used, used);
      for (int j = 0; j < used; ++j) t(j, j) = alpha[static_cast<std::size_t>(j)];
      for (int j = 0; j + 1 < used; ++j) t(j, j + 1) = t(j + 1, j) = beta[static_cast<std::size_t>(j)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
      g.energy = tri.eigenvalues()(0);
      g.vector = basis.leftCols(used) * tri.eigenvectors().col(0).cast<cd>();
      g.vector.normalize();
      const double r = (h.matrix * g.vector - g.energy * g.vector).norm();
      converged = r <= options.tolerance * scale;
      start = g.vector;
    }
    if (!converged) {
      const double r = (h.matrix * g.vector - g.energy * g.vector).norm();
      throw SolverError("Lanczos did not converge; residual " + std::to_string(r), r);
    }
  }
  g.residual = (h.matrix * g.vector - g.energy * g.vector).norm();
  if (g.residual > options.tolerance * scale) {
    throw SolverError("Fock ground state residual " + std::to_string(g.residual) + " exceeds tolerance",
                      g.residual);
  }
  return g;
}

double ground_energy(const FockHamiltonian& h, const FockSolverOptions& options) {
  return ground_state(h, options).energy;
}

double condensate_energy(const FockHamiltonian& h, const FockBasis& basis, const ModeLattice& lattice) {
  std::vector<int> occ(basis.mode_count(), 0);
  const auto slot = std::find(h.mode_labels.begin(), h.mode_labels.end(), lattice.zero_index());
  occ[static_cast<std::size_t>(slot - h.mode_labels.begin())] = basis.n_particles();
  const auto idx = static_cast<std::ptrdiff_t>(*basis.index_of(occ));
  return h.matrix.coeff(idx, idx).real();
}

IntVec total_momentum(const FockBasis& basis, std::size_t index, const ModeLattice& lattice,
                      std::span<const std::size_t> mode_labels) {
  IntVec p(static_cast<std::size_t>(lattice.dimension()), 0);
  const auto s = basis.state(index);
  for (std::size_t m = 0; m < s.size(); ++m) {
    const std::size_t label = mode_labels.empty() ? m : mode_labels[m];
    for (std::size_t d = 0; d < p.size(); ++d) p[d] += s[m] * lattice.label(label)[d];
  }
  return p;
}

std::vector<MeanFieldRow> mean_field_comparison(const ModeLattice& lattice, int n_particles,
                                                std::span<const double> couplings, double hbar2_over_2m,
                                                const FockSolverOptions& options) {
  const FockBasis basis = enumerate_basis(lattice.size(), n_particles);
  const double n = n_particles;
  const double v = lattice.volume();
  std::vector<MeanFieldRow> rows;
  for (double u : couplings) {
    if (!(u > 0.0)) throw ConfigError("couplings must be positive");
    const std::vector<double> u_k(lattice.size(), u);
    MeanFieldRow row;
    row.coupling = u;

    FockOptions paper;
    paper.hbar2_over_2m = hbar2_over_2m;
    const FockHamiltonian h = build_hamiltonian(lattice, u_k, 0.0, 0.0, basis, paper);
    row.oracle_energy = ground_energy(h, options);
    row.oracle_energy_per_particle = row.oracle_energy / n;
    row.condensate_energy = condensate_energy(h, basis, lattice);
    row.prediction_per_particle = u * n / v;
    row.relative_deviation = (row.oracle_energy_per_particle - row.prediction_per_particle) / row.prediction_per_particle;

    FockOptions textbook = paper;
    textbook.form = InteractionForm::normal_ordered;
    const FockHamiltonian ht = build_hamiltonian(lattice, u_k, 0.0, 0.0, basis, textbook);
    row.textbook_energy_per_particle = ground_energy(ht, options) / n;
    row.textbook_relative_deviation =
        (row.textbook_energy_per_particle - row.prediction_per_particle) / row.prediction_per_particle;

    // Functional side: gamma = 2m U_0 / (hbar^2 V), u_0 = 0, weak operator.
    ModelParams params;
    params.gamma = u / (hbar2_over_2m * v);
    params.n_particles = n_particles;
    const HermiteBasis hb(lattice, params, 0);
    const OperatorMatrix weak = assemble_weak(params, lattice, hb);
    const cd lambda = ground_state(weak).eigenvalue;
    const double e_func = energy_from_eigenvalue(lambda, params, hbar2_over_2m).real();
    row.functional_energy_per_particle = e_func / n;
    const double target = u * n * n / v;
    row.functional_relative_mismatch = std::abs(e_func - target) / target;
    rows.push_back(row);
  }
  return rows;
}

void write_mean_field_csv(std::ostream& out, std::span<const MeanFieldRow> rows) {
  std::ostringstream s;
  s << std::setprecision(17)
    << "coupling,oracle_e_per_n,prediction_e_per_n,relative_deviation,textbook_e_per_n,"
       "textbook_relative_deviation,functional_e_per_n,functional_relative_mismatch\n";
  for (const auto& r : rows) {
    s << r.coupling << ',' << r.oracle_energy_per_particle << ',' << r.prediction_per_particle << ','
      << r.relative_deviation << ',' << r.textbook_energy_per_particle << ',' << r.textbook_relative_deviation << ','
      << r.functional_energy_per_particle << ',' << r.functional_relative_mismatch << '\n';
  }
  out << s.str();
}

}  // namespace cfe
