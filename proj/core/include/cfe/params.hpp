#pragma once

#include <complex>
#include <vector>

#include "cfe/lattice.hpp"

namespace cfe {

/// Scaled model parameters, in units where hbar^2/(2m) = 1.
///
/// u_k and gamma_k are indexed like ModeLattice; empty vectors mean u = 0 and
/// gamma_k = gamma (contact interaction with a sharp momentum cutoff).
struct ModelParams {
  double gamma = 1.0;
  std::vector<double> gamma_k;
  std::vector<std::complex<double>> u_k;
  int n_particles = 0;
  double epsilon = 1.0;
  double kappa = 1.0;
  double p_exp = 0.5;
  double q_exp = 0.5;

  /// Throws ConfigError unless gamma > 0, N >= 0, array sizes match the lattice,
  /// u_{-k} = conj(u_k) and gamma_k is real, even and positive.
  void validate(const ModeLattice& lattice) const;

  std::complex<double> u(std::size_t mode) const {
    return u_k.empty() ? std::complex<double>{} : u_k[mode];
  }
  double gamma_at(std::size_t mode) const { return gamma_k.empty() ? gamma : gamma_k[mode]; }

  /// u_0, the uniform part of the scaled potential.
  double u0(const ModeLattice& lattice) const { return u(lattice.zero_index()).real(); }
  void set_u0(const ModeLattice& lattice, double value);

  /// ebar_N = N (u_0 + gamma_0 N).
  double ebar(const ModeLattice& lattice) const;
  double rho(const ModeLattice& lattice) const { return n_particles / lattice.volume(); }

  /// True when u_k = 0 for every k != 0.
  bool constant_potential(const ModeLattice& lattice) const;
};

}  // namespace cfe
