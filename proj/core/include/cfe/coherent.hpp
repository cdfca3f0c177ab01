#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cfe/lattice.hpp"

namespace cfe {

using cd = std::complex<double>;

/// Coherent amplitude alpha(x) = r * exp(i phi(x)) sampled on a periodic grid.
/// The magnitude r is constant in space; only the phase field varies.
class CoherentField {
 public:
  /// Phase given directly as grid samples phi(x_j).
  static CoherentField from_grid(const SpatialGrid& grid, double r, std::vector<double> phases);

  /// Phase given by its Fourier coefficients on a momentum lattice,
  /// phi(x) = sum_k phi_k exp(i k.x). Coefficients must satisfy phi_{-k} = conj(phi_k).
  static CoherentField from_modes(const SpatialGrid& grid, double r, const ModeLattice& lattice,
                                  std::span<const cd> modes);

  /// Inverse of dft_modes(): full set of M^D discrete Fourier coefficients in
  /// FFT layout (non-negative frequencies first along each axis).
  static CoherentField from_dft_modes(const SpatialGrid& grid, double r, std::span<const cd> modes);

  const SpatialGrid& grid() const noexcept { return grid_; }
  double r() const noexcept { return r_; }
  const std::vector<double>& phases() const noexcept { return phases_; }
  cd amplitude(std::size_t j) const { return std::polar(r_, phases_[j]); }

  /// phi_k = M^{-D} sum_j phi(x_j) exp(-i k.x_j), FFT layout.
  std::vector<cd> dft_modes() const;

 private:
  CoherentField(SpatialGrid grid, double r, std::vector<double> phases);

  SpatialGrid grid_;
  double r_;
  std::vector<double> phases_;
};

/// Exponent and value of an unnormalised coherent-state overlap.
struct OverlapResult {
  cd g;
  cd value;
};

/// G[a, b] = integral of conj(a) * b, evaluated as (V/M^D) * sum_j conj(a_j) b_j.
cd exponent_g(const CoherentField& a, const CoherentField& b);

/// <a||b> = exp(G[a, b]). Throws RangeError (carrying G) if exp(G) overflows.
OverlapResult overlap(const CoherentField& a, const CoherentField& b);

/// G^N / N!, accumulated as a running product. Throws RangeError on overflow.
cd projected_power(cd g, unsigned n);

/// Number-projected overlap <a||b>_N = G^N / N!.
cd number_overlap_closed(const CoherentField& a, const CoherentField& b, unsigned n);

/// mq-point trapezoid rule for (1/2pi) * integral d(theta) exp(-i theta N) f(theta).
cd phase_projection(const std::function<cd(double)>& f, unsigned n, unsigned mq);

/// Trapezoid evaluation of the projected overlap for a given exponent G.
/// Equal to sum over m = N (mod mq), m >= 0 of G^m / m!.
cd projected_quadrature(cd g, unsigned n, unsigned mq);

/// Same as projected_quadrature with G = exponent_g(a, b).
cd number_overlap_quadrature(const CoherentField& a, const CoherentField& b, unsigned n,
                             unsigned mq);

/// sum_{j >= 1} G^{N + j mq} / (N + j mq)!, summed until terms drop below double resolution.
cd aliasing_tail(cd g, unsigned n, unsigned mq);

/// Upper bound on |aliasing_tail| obtained by replacing G with |G|.
double aliasing_tail_bound(double abs_g, unsigned n, unsigned mq);

/// Gram matrix of overlaps K (or K_N when n is given) over a set of fields.
Eigen::MatrixXcd kernel_gram(std::span<const CoherentField> states,
                             std::optional<unsigned> n = std::nullopt);

}  // namespace cfe
