#include "cfe/hermite.hpp"

#include <cmath>
#include <string>

#include "cfe/errors.hpp"

namespace cfe {

HermiteBasis::HermiteBasis(const ModeLattice& lattice, const ModelParams& params, int n_max,
                           double width_factor)
    : HermiteBasis(lattice, params,
                   std::vector<int>(RealCoordinateMap(lattice).coordinate_count(), n_max),
                   width_factor) {}

HermiteBasis::HermiteBasis(const ModeLattice& lattice, const ModelParams& params,
                           std::vector<int> n_max, double width_factor)
    : lattice_(lattice), coords_(lattice), n_max_(std::move(n_max)) {
  params.validate(lattice);
  if (n_max_.size() != coords_.coordinate_count()) {
    throw ConfigError("basis needs one cutoff per real coordinate (" +
                      std::to_string(coords_.coordinate_count()) + "), got " +
                      std::to_string(n_max_.size()));
  }
  if (!(width_factor > 0.0)) throw ConfigError("basis width factor must be positive");
  sigma_.reserve(n_max_.size());
  for (const auto& c : coords_.coordinates()) {
    sigma_.push_back(width_factor * std::sqrt(params.gamma_at(c.mode) / (2.0 * c.k_squared)));
  }
  finish();
}

void HermiteBasis::finish() {
  stride_.assign(n_max_.size(), 1);
  dimension_ = 1;
  for (std::size_t c = n_max_.size(); c-- > 0;) {
    if (n_max_[c] < 0) throw ConfigError("basis cutoff must be non-negative");
    stride_[c] = dimension_;
    dimension_ *= static_cast<std::size_t>(n_max_[c] + 1);
    if (dimension_ > (std::size_t{1} << 31)) throw ConfigError("basis dimension too large");
  }
}

std::vector<int> HermiteBasis::multi_index(std::size_t flat) const {
  std::vector<int> degrees(n_max_.size());
  for (std::size_t c = 0; c < n_max_.size(); ++c) {
    degrees[c] = static_cast<int>(flat / stride_[c]);
    flat %= stride_[c];
  }
  return degrees;
}

std::size_t HermiteBasis::flat_index(std::span<const int> degrees) const {
  std::size_t flat = 0;
  for (std::size_t c = 0; c < n_max_.size(); ++c) flat += stride_[c] * static_cast<std::size_t>(degrees[c]);
  return flat;
}

bool HermiteBasis::contains(std::span<const int> degrees) const {
  for (std::size_t c = 0; c < n_max_.size(); ++c) {
    if (degrees[c] < 0 || degrees[c] > n_max_[c]) return false;
  }
  return true;
}

double hermite_he(int n, double t) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int m = 1; m < n; ++m) {
    const double next = t * cur - m * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> gaussian_coefficients(double variance_ratio, int n_max) {
  if (!(variance_ratio > 0.0)) throw ConfigError("variance ratio must be positive");
  std::vector<double> c(static_cast<std::size_t>(n_max + 1), 0.0);
  const double half_shift = 0.5 * (variance_ratio - 1.0);
  double term = std::sqrt(variance_ratio);
  for (int j = 0; 2 * j <= n_max; ++j) {
    if (j > 0) term *= half_shift / j;
    c[static_cast<std::size_t>(2 * j)] = term;
  }
  return c;
}

}  // namespace cfe
