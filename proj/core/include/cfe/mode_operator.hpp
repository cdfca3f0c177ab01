#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfe/hermite.hpp"
#include "cfe/lattice.hpp"
#include "cfe/params.hpp"
#include "cfe/sparse.hpp"

namespace cfe {

enum class OperatorVariant { weak, full, scaled };

std::string to_string(OperatorVariant v);

/// A number-conserving phase-space operator in the tensor Hermite basis.
/// The represented operator is `matrix + offset * I`, with offset = -ebar_N.
///
/// Column j holds the expansion of L f_j, so applying the matrix to a coefficient
/// vector gives the coefficients of L psi.
struct OperatorMatrix {
  SparseMatrixC matrix;
  double offset = 0.0;
  std::vector<std::size_t> basis_dims;
  OperatorVariant variant = OperatorVariant::full;
  ModelParams params;
  std::vector<std::string> warnings;

  std::ptrdiff_t dimension() const noexcept { return matrix.rows(); }
  Eigen::MatrixXcd dense() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& coeffs) const;
};

struct AssemblyOptions {
  unsigned threads = 1;
  double prune_tolerance = 1e-15;
};

/// A_k = -k^2 phi_k + i (u_k - epsilon * sum_q q.(k-q) phi_q phi_{k-q}) for every
/// lattice mode k. Convolution terms with q or k-q off the lattice are dropped.
std::vector<std::complex<double>> drift_term(std::span<const std::complex<double>> phi_modes,
                                             const ModelParams& params, const ModeLattice& lattice);

/// Weak-coupling number-conserving operator
///   L_N^W = sum_{k != 0} d/dphi_k (k^2 phi_k + gamma d/dphi_k^*) - ebar_N.
/// Diagonal in a variance-matched basis; throws ConfigError if the basis is not
/// matched to params or the potential is not uniform.
OperatorMatrix assemble_weak(const ModelParams& params, const ModeLattice& lattice,
                             const HermiteBasis& basis, const AssemblyOptions& options = {});

/// Full number-conserving operator
///   L = sum_{k != 0} [-d_k A_k + gamma_k d_k d_{-k}] - ebar_N
/// with the epsilon-weighted cubic drift and the k != 0 potential terms.
OperatorMatrix assemble_full(const ModelParams& params, const ModeLattice& lattice,
                             const HermiteBasis& basis, const AssemblyOptions& options = {});

/// Coefficients of the rescaled operator: kappa^p on |grad phi|^2, kappa^(q-p) on u,
/// kappa^(1-2p) on the diffusion.
struct ScaledCoefficients {
  double gradient;
  double potential;
  double diffusion;
};
ScaledCoefficients scaled_coefficients(const ModelParams& params);

/// Parameters with the three kappa-dependent coefficients substituted in.
ModelParams scaled_params(const ModelParams& params);

OperatorMatrix scaled_operator(const ModelParams& params, const HermiteBasis& basis,
                               const AssemblyOptions& options = {});

/// assemble_full(epsilon = 1) - assemble_full(epsilon = 0): the pure cubic drift.
OperatorMatrix cubic_perturbation(const ModelParams& params, const ModeLattice& lattice,
                                  const HermiteBasis& basis, const AssemblyOptions& options = {});

/// Expansion coefficients of psi_g = exp(-(1/2 gamma) sum_k k^2 |phi_k|^2). In a
/// variance-matched basis this is the unit vector on the all-zero multi-index.
Eigen::VectorXcd gaussian_ground_coeffs(const ModelParams& params, const HermiteBasis& basis);

}  // namespace cfe
