#include "cfe/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cfe/errors.hpp"

namespace cfe {

ModeLattice::ModeLattice(int dimension, double box_length, int modes_per_dim)
    : dimension_(dimension), box_length_(box_length), modes_per_dim_(modes_per_dim) {
  if (dimension < 1 || dimension > 3) {
    throw ConfigError("lattice dimension must be 1, 2 or 3, got " + std::to_string(dimension));
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ConfigError("lattice box length must be positive and finite");
  }
  if (modes_per_dim < 1 || modes_per_dim % 2 == 0) {
    throw ConfigError("modes per dimension must be a positive odd integer, got " +
                      std::to_string(modes_per_dim));
  }
  half_ = (modes_per_dim - 1) / 2;
  volume_ = std::pow(box_length, dimension);
  k_unit_ = 2.0 * std::numbers::pi / box_length;

  std::size_t total = 1;
  for (int d = 0; d < dimension; ++d) total *= static_cast<std::size_t>(modes_per_dim);
  labels_.reserve(total);
  IntVec n(static_cast<std::size_t>(dimension), -half_);
  for (std::size_t i = 0; i < total; ++i) {
    labels_.push_back(n);
    for (int d = dimension - 1; d >= 0; --d) {
      if (++n[static_cast<std::size_t>(d)] <= half_) break;
      n[static_cast<std::size_t>(d)] = -half_;
    }
  }
}

std::vector<double> ModeLattice::k_vector(std::size_t i) const {
  std::vector<double> k(labels_[i].size());
  for (std::size_t d = 0; d < k.size(); ++d) k[d] = k_unit_ * labels_[i][d];
  return k;
}

double ModeLattice::dot(std::size_t i, std::size_t j) const {
  long long s = 0;
  for (std::size_t d = 0; d < labels_[i].size(); ++d) {
    s += static_cast<long long>(labels_[i][d]) * labels_[j][d];
  }
  return k_unit_ * k_unit_ * static_cast<double>(s);
}

std::optional<std::size_t> ModeLattice::find(const IntVec& n) const {
  if (n.size() != static_cast<std::size_t>(dimension_)) return std::nullopt;
  std::size_t index = 0;
  for (int c : n) {
    if (c < -half_ || c > half_) return std::nullopt;
    index = index * static_cast<std::size_t>(modes_per_dim_) + static_cast<std::size_t>(c + half_);
  }
  return index;
}

std::optional<std::size_t> ModeLattice::combine(std::size_t i, std::size_t j, bool subtract) const {
  IntVec n = labels_[i];
  for (std::size_t d = 0; d < n.size(); ++d) n[d] += subtract ? -labels_[j][d] : labels_[j][d];
  return find(n);
}

SpatialGrid::SpatialGrid(int dimension, double box_length, int points_per_dim)
    : dimension_(dimension), box_length_(box_length), points_per_dim_(points_per_dim) {
  if (dimension < 1 || dimension > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw ConfigError("grid box length must be positive and finite");
  }
  if (points_per_dim < 1) throw ConfigError("grid needs at least one point per dimension");
  size_ = 1;
  for (int d = 0; d < dimension; ++d) size_ *= static_cast<std::size_t>(points_per_dim);
  volume_ = std::pow(box_length, dimension);
}

std::vector<double> SpatialGrid::position(std::size_t j) const {
  std::vector<double> x(static_cast<std::size_t>(dimension_));
  const double h = box_length_ / points_per_dim_;
  for (int d = dimension_ - 1; d >= 0; --d) {
    x[static_cast<std::size_t>(d)] = h * static_cast<double>(j % points_per_dim_);
    j /= static_cast<std::size_t>(points_per_dim_);
  }
  return x;
}

RealCoordinateMap::RealCoordinateMap(const ModeLattice& lattice)
    : pair_of_(lattice.size(), 0), canonical_flag_(lattice.size(), false) {
  const std::size_t zero = lattice.zero_index();
  for (std::size_t i = zero + 1; i < lattice.size(); ++i) {
    const std::size_t pair = canonical_.size();
    canonical_.push_back(i);
    pair_of_[i] = pair;
    pair_of_[lattice.negated(i)] = pair;
    canonical_flag_[i] = true;
    const double k2 = lattice.k_squared(i);
    coordinates_.push_back({pair, false, i, k2});
    coordinates_.push_back({pair, true, i, k2});
  }
}

}  // namespace cfe
