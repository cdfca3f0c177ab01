#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfe/hermite.hpp"
#include "cfe/mode_operator.hpp"
#include "cfe/params.hpp"

namespace cfe {

struct EigenPair {
  std::complex<double> eigenvalue;
  Eigen::VectorXcd right;
  Eigen::VectorXcd left;  // normalised so that left^H right = 1
  double residual = 0.0;  // ||(A - lambda) right|| / ||right||
};

struct EigenOptions {
  bool want_vectors = true;
  bool want_left = true;
  double residual_tolerance = 1e-9;
  /// Real parts (and then |imag|) closer than tie_tolerance * max(1, |lambda|max) count as equal.
  double tie_tolerance = 1e-10;
  /// Eigenvalues closer than this (relative) are bi-orthogonalised as one cluster.
  double cluster_tolerance = 1e-8;
  std::ptrdiff_t dense_limit = 4000;
};

/// Complete dense eigen-decomposition, sorted by descending real part, then
/// ascending |imag|, then solver order. Columns of `left` satisfy left^H right = I.
struct Decomposition {
  std::vector<std::complex<double>> values;
  Eigen::MatrixXcd right;
  Eigen::MatrixXcd left;
};

Decomposition decompose(const Eigen::MatrixXcd& a, const EigenOptions& options = {});

/// The `count` leading eigenpairs of op (all of them when count exceeds the dimension).
/// Throws SolverError if a residual exceeds the tolerance or the matrix is too large
/// for the dense path.
std::vector<EigenPair> eigen_spectrum(const OperatorMatrix& op, std::size_t count,
                                      const EigenOptions& options = {});

/// All eigenvalues in the sort order of eigen_spectrum, without vectors.
std::vector<std::complex<double>> eigenvalues(const OperatorMatrix& op, const EigenOptions& options = {});

/// Eigenpair with the largest real part (ties: smallest |imag|, then solver order).
EigenPair ground_state(const OperatorMatrix& op, const EigenOptions& options = {});

/// u_0 such that the ground eigenvalue of the chosen variant is zero.
/// Weak variant: closed form u_0 = -gamma N. Full variant: bracketed root-find.
double calibrate_mu(const ModelParams& params, const ModeLattice& lattice, const HermiteBasis& basis,
                    OperatorVariant variant, const EigenOptions& options = {});

/// E = hbar^2 e / (2m) with e = -lambda.
std::complex<double> energy_from_eigenvalue(std::complex<double> lambda, const ModelParams& params,
                                            double hbar2_over_2m);

struct PerturbationSeries {
  std::vector<std::complex<double>> orders;
  std::string epsilon_ref = "epsilon";

  /// sum_{j <= max_order} epsilon^j e^(j).
  std::complex<double> evaluate(double epsilon, std::size_t max_order) const;
};

/// Rayleigh-Schroedinger series of the ground eigenvalue of op0 + epsilon * op1,
/// using bi-orthogonal left/right eigenvectors of op0. Throws SolverError when the
/// ground level is (nearly) degenerate.
PerturbationSeries perturbation_series(const OperatorMatrix& op0, const OperatorMatrix& op1,
                                       std::size_t max_order, const EigenOptions& options = {});

/// Largest distance |a_i - conj(b_pi(i))| over a greedy nearest matching of the two
/// multisets; infinity when the sizes differ.
double conjugate_multiset_distance(std::span<const std::complex<double>> a,
                                   std::span<const std::complex<double>> b);

/// Same matching without conjugation.
double multiset_distance(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// CSV: index,re,im,residual
void write_spectrum_csv(std::ostream& out, std::span<const EigenPair> pairs);
/// CSV: order,re,im
void write_series_csv(std::ostream& out, const PerturbationSeries& series);

}  // namespace cfe
