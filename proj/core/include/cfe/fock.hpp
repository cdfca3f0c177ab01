#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cfe/lattice.hpp"
#include "cfe/sparse.hpp"

namespace cfe {

/// Occupation-number basis of the fixed-N sector over M modes, ordered
/// lexicographically from (N, 0, ..., 0) down to (0, ..., 0, N).
class FockBasis {
 public:
  std::size_t size() const noexcept { return count_; }
  std::size_t mode_count() const noexcept { return modes_; }
  int n_particles() const noexcept { return n_; }

  std::span<const int> state(std::size_t index) const {
    return {occupations_.data() + index * modes_, modes_};
  }

  /// Position of an occupation vector in the ordering (combinatorial ranking), or
  /// nullopt if it is not in this sector.
  std::optional<std::size_t> index_of(std::span<const int> occupation) const;

  /// C(N + M - 1, M - 1) without overflow for the sizes we accept.
  static double sector_size(std::size_t modes, int n_particles);

  static constexpr std::size_t kMaxStates = 2'000'000;

 private:
  friend FockBasis enumerate_basis(std::size_t m_modes, int n_particles);
  std::size_t count_with(int particles, std::size_t free_modes) const;

  std::size_t modes_ = 0;
  int n_ = 0;
  std::size_t count_ = 0;
  std::vector<int> occupations_;
  // binom_[r][f]: number of ways to put r particles in f modes.
  std::vector<std::vector<std::size_t>> ways_;
};

FockBasis enumerate_basis(std::size_t m_modes, int n_particles);

enum class InteractionForm {
  /// (1/V) sum_k U_k n_k n_{-k}, not normal-ordered (self-interaction terms kept).
  density_density,
  /// (1/2V) sum_{k,p,q} U_k a+_{p+k} a+_{q-k} a_q a_p, the textbook contact form.
  normal_ordered,
};

struct FockHamiltonian {
  SparseMatrixC matrix;
  std::vector<double> u_int_k;
  double u0_ext = 0.0;
  double mu = 0.0;
  double hbar2_over_2m = 1.0;
  InteractionForm form = InteractionForm::density_density;
  /// Lattice index carried by each basis mode slot.
  std::vector<std::size_t> mode_labels;
};

struct FockOptions {
  double hbar2_over_2m = 1.0;
  InteractionForm form = InteractionForm::density_density;
  /// Optional relabelling: slot m of the basis carries lattice mode mode_labels[m].
  std::vector<std::size_t> mode_labels;
  unsigned threads = 1;
};

/// H = sum_k (hbar^2 k^2 / 2m) a+_k a_k + (U_0 - mu) N + interaction, on the
/// lattice modes. Density components n_k = sum_q a+_q a_{q+k} drop terms with q+k
/// off the lattice. u_int_k is indexed like the lattice and must be even in k.
FockHamiltonian build_hamiltonian(const ModeLattice& lattice, std::span<const double> u_int_k, double u0_ext,
                                  double mu, const FockBasis& basis, const FockOptions& options = {});

struct FockGround {
  double energy = 0.0;
  double residual = 0.0;
  Eigen::VectorXcd vector;
};

struct FockSolverOptions {
  std::ptrdiff_t dense_limit = 3000;
  double tolerance = 1e-10;
  int max_restarts = 50;
  int krylov_dim = 120;
};

/// Smallest eigenvalue: dense Hermitian solve below dense_limit, restarted Lanczos
/// with full re-orthogonalisation above. Residual must be <= tolerance * ||H||_max.
FockGround ground_state(const FockHamiltonian& h, const FockSolverOptions& options = {});
double ground_energy(const FockHamiltonian& h, const FockSolverOptions& options = {});

/// <c|H|c> for the condensate |N particles in k = 0>.
double condensate_energy(const FockHamiltonian& h, const FockBasis& basis, const ModeLattice& lattice);

/// Total lattice momentum label of a basis state.
IntVec total_momentum(const FockBasis& basis, std::size_t index, const ModeLattice& lattice,
                      std::span<const std::size_t> mode_labels = {});

struct MeanFieldRow {
  double coupling = 0.0;
  double oracle_energy_per_particle = 0.0;
  double prediction_per_particle = 0.0;  // U_0 N / V
  double relative_deviation = 0.0;
  double textbook_energy_per_particle = 0.0;
  double textbook_relative_deviation = 0.0;
  double functional_energy_per_particle = 0.0;  // from the weak operator's ground eigenvalue
  double functional_relative_mismatch = 0.0;    // vs U_0 N^2 / V
  double condensate_energy = 0.0;
  double oracle_energy = 0.0;
};

/// Oracle E/N against U_0 rho for each contact coupling U_0 (mu = U_ext = 0).
std::vector<MeanFieldRow> mean_field_comparison(const ModeLattice& lattice, int n_particles,
                                                std::span<const double> couplings, double hbar2_over_2m = 1.0,
                                                const FockSolverOptions& options = {});

/// CSV: coupling,oracle_e_per_n,prediction_e_per_n,relative_deviation,textbook_e_per_n,
///      textbook_relative_deviation,functional_e_per_n,functional_relative_mismatch
void write_mean_field_csv(std::ostream& out, std::span<const MeanFieldRow> rows);

}  // namespace cfe
