#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cfe/lattice.hpp"
#include "cfe/params.hpp"

namespace cfe {

/// Tensor-product basis over the real phase coordinates. Along coordinate c the
/// functions are f_n(x) = He_n(x/sigma_c) exp(-x^2 / (2 sigma_c^2)), n = 0..n_max_c,
/// with He_n the probabilists' Hermite polynomials.
///
/// With sigma_c = sqrt(gamma_k / (2 k^2)) the degree-0 function is exactly the
/// per-coordinate factor exp(-k^2 x^2 / gamma) of the Gaussian ground state, and
/// the weak-coupling operator is diagonal.
///
/// Flat index: first coordinate slowest.
class HermiteBasis {
 public:
  /// Variance-matched basis (width_factor = 1) or a deliberately rescaled one.
  HermiteBasis(const ModeLattice& lattice, const ModelParams& params, int n_max,
               double width_factor = 1.0);
  HermiteBasis(const ModeLattice& lattice, const ModelParams& params, std::vector<int> n_max,
               double width_factor = 1.0);

  const ModeLattice& lattice() const noexcept { return lattice_; }
  const RealCoordinateMap& coordinates() const noexcept { return coords_; }
  std::size_t coordinate_count() const noexcept { return n_max_.size(); }
  int n_max(std::size_t c) const { return n_max_[c]; }
  const std::vector<int>& n_max() const noexcept { return n_max_; }
  double sigma(std::size_t c) const { return sigma_[c]; }
  const std::vector<double>& sigmas() const noexcept { return sigma_; }
  std::size_t dimension() const noexcept { return dimension_; }

  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> degrees) const;
  /// False if any degree is negative or above its cutoff.
  bool contains(std::span<const int> degrees) const;

 private:
  void finish();

  ModeLattice lattice_;
  RealCoordinateMap coords_;
  std::vector<int> n_max_;
  std::vector<double> sigma_;
  std::vector<std::size_t> stride_;
  std::size_t dimension_ = 1;
};

/// Probabilists' Hermite polynomial He_n(t) by the three-term recurrence.
double hermite_he(int n, double t);

/// Coefficients c_n of exp(-x^2 / (2 s^2)) = sum_n c_n He_n(x/sigma) exp(-x^2/(2 sigma^2)),
/// with variance_ratio = s^2 / sigma^2. Closed form: c_{2j} = sqrt(v) ((v-1)/2)^j / j!.
std::vector<double> gaussian_coefficients(double variance_ratio, int n_max);

}  // namespace cfe
