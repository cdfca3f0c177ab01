#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace cfe {

/// Integer momentum label n; the physical momentum is k = (2*pi/L) * n.
using IntVec = std::vector<int>;

/// Periodic box of side L in D dimensions with the retained momenta
/// k = 2*pi*n/L, n_i in [-(m-1)/2, (m-1)/2]. The set is closed under k -> -k.
///
/// Modes are stored in lexicographic order of n (first component slowest), so the
/// zero mode sits at size()/2 and the partner of mode i is size()-1-i.
class ModeLattice {
 public:
  ModeLattice(int dimension, double box_length, int modes_per_dim);

  int dimension() const noexcept { return dimension_; }
  double box_length() const noexcept { return box_length_; }
  int modes_per_dim() const noexcept { return modes_per_dim_; }
  double volume() const noexcept { return volume_; }
  double k_unit() const noexcept { return k_unit_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t zero_index() const noexcept { return labels_.size() / 2; }
  std::size_t negated(std::size_t i) const noexcept { return labels_.size() - 1 - i; }

  const IntVec& label(std::size_t i) const { return labels_[i]; }
  const std::vector<IntVec>& labels() const noexcept { return labels_; }
  std::vector<double> k_vector(std::size_t i) const;

  /// k_i . k_j, computed as k_unit^2 times an exact integer dot product.
  double dot(std::size_t i, std::size_t j) const;
  double k_squared(std::size_t i) const { return dot(i, i); }

  /// Index of label n, or nullopt when n lies outside the cutoff.
  std::optional<std::size_t> find(const IntVec& n) const;

  /// Index of label(i) + label(j) (or minus when subtract is set), if on the lattice.
  std::optional<std::size_t> combine(std::size_t i, std::size_t j, bool subtract = false) const;

  friend bool operator==(const ModeLattice& a, const ModeLattice& b) {
    return a.dimension_ == b.dimension_ && a.box_length_ == b.box_length_ &&
           a.modes_per_dim_ == b.modes_per_dim_;
  }

 private:
  int dimension_;
  double box_length_;
  int modes_per_dim_;
  int half_;
  double volume_;
  double k_unit_;
  std::vector<IntVec> labels_;
};

/// Uniform periodic grid of `points_per_dim` samples per axis; the measure of
/// each cell is V / M^D.
class SpatialGrid {
 public:
  SpatialGrid(int dimension, double box_length, int points_per_dim);

  int dimension() const noexcept { return dimension_; }
  double box_length() const noexcept { return box_length_; }
  int points_per_dim() const noexcept { return points_per_dim_; }
  std::size_t size() const noexcept { return size_; }
  double volume() const noexcept { return volume_; }
  double cell_measure() const noexcept { return volume_ / static_cast<double>(size_); }

  /// Position of flat grid point j (first axis slowest).
  std::vector<double> position(std::size_t j) const;

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.dimension_ == b.dimension_ && a.box_length_ == b.box_length_ &&
           a.points_per_dim_ == b.points_per_dim_;
  }

 private:
  int dimension_;
  double box_length_;
  int points_per_dim_;
  std::size_t size_;
  double volume_;
};

/// One real coordinate of the phase field: x or y of a (k, -k) pair with
/// phi_k = x + i y and phi_{-k} = x - i y.
struct RealCoordinate {
  std::size_t pair = 0;
  bool imaginary = false;  // false: x, true: y
  std::size_t mode = 0;    // lattice index of the canonical (+k) member
  double k_squared = 0.0;
};

/// Maps every nonzero lattice mode onto real coordinates. The canonical member of
/// each pair is the one with the larger lattice index; pair p owns coordinates 2p, 2p+1.
class RealCoordinateMap {
 public:
  explicit RealCoordinateMap(const ModeLattice& lattice);

  std::size_t pair_count() const noexcept { return canonical_.size(); }
  std::size_t coordinate_count() const noexcept { return coordinates_.size(); }
  const std::vector<RealCoordinate>& coordinates() const noexcept { return coordinates_; }
  const RealCoordinate& coordinate(std::size_t c) const { return coordinates_[c]; }
  std::size_t canonical_mode(std::size_t pair) const { return canonical_[pair]; }

  /// Pair owning lattice mode i (i must be nonzero) and whether i is the canonical member.
  std::size_t pair_of(std::size_t mode) const { return pair_of_[mode]; }
  bool is_canonical(std::size_t mode) const { return canonical_flag_[mode]; }

 private:
  std::vector<std::size_t> canonical_;
  std::vector<RealCoordinate> coordinates_;
  std::vector<std::size_t> pair_of_;
  std::vector<bool> canonical_flag_;
};

}  // namespace cfe
