#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

namespace cfe {

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor, std::ptrdiff_t>;

/// One assembled column: (row, value) pairs with strictly increasing rows.
using SparseColumn = std::vector<std::pair<std::ptrdiff_t, std::complex<double>>>;

/// Builds an n x n matrix column by column. Columns are distributed over `threads`
/// workers; each column is produced by a single call so the result does not depend
/// on the thread count.
SparseMatrixC build_by_columns(std::size_t n, unsigned threads,
                               const std::function<SparseColumn(std::size_t)>& column);

/// Drops entries with |a_ij| < rel_tol * max |a_ij| (and exact zeros).
SparseMatrixC prune(const SparseMatrixC& m, double rel_tol);

double max_abs(const SparseMatrixC& m);

/// Sparse triplet text format:
///
///   # cfe sparse triplet v1
///   <rows> <cols> <nnz> <offset>
///   <row> <col> <re> <im>      (0-based, sorted by row then col)
///
/// Reals are printed with 17 significant digits.
struct TripletData {
  std::ptrdiff_t rows = 0;
  std::ptrdiff_t cols = 0;
  double offset = 0.0;
  std::vector<Eigen::Triplet<std::complex<double>, std::ptrdiff_t>> entries;

  SparseMatrixC to_matrix() const;
};

void write_triplets(std::ostream& out, const SparseMatrixC& m, double offset);
TripletData read_triplets(std::istream& in);

}  // namespace cfe
