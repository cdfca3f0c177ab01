#include "cfe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "cfe/errors.hpp"

namespace cfe {

SparseMatrixC build_by_columns(std::size_t n, unsigned threads,
                               const std::function<SparseColumn(std::size_t)>& column) {
  std::vector<SparseColumn> columns(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t j = 0; j < n; ++j) columns[j] = column(j);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < n; j += workers) columns[j] = column(j);
      });
    }
  }

  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.size();
  const auto size = static_cast<std::ptrdiff_t>(n);
  SparseMatrixC m(size, size);
  m.reserve(static_cast<std::ptrdiff_t>(nnz));
  for (std::size_t j = 0; j < n; ++j) {
    m.startVec(static_cast<std::ptrdiff_t>(j));
    for (const auto& [row, value] : columns[j]) {
      m.insertBack(row, static_cast<std::ptrdiff_t>(j)) = value;
    }
  }
  m.finalize();
  return m;
}

double max_abs(const SparseMatrixC& m) {
  double largest = 0.0;
  for (std::ptrdiff_t j = 0; j < m.outerSize(); ++j) {
    for (SparseMatrixC::InnerIterator it(m, j); it; ++it) largest = std::max(largest, std::abs(it.value()));
  }
  return largest;
}

SparseMatrixC prune(const SparseMatrixC& m, double rel_tol) {
  const double cut = rel_tol * max_abs(m);
  SparseMatrixC out = m;
  out.prune([cut](std::ptrdiff_t, std::ptrdiff_t, const std::complex<double>& v) {
    return v != std::complex<double>{} && std::abs(v) >= cut;
  });
  out.makeCompressed();
  return out;
}

SparseMatrixC TripletData::to_matrix() const {
  SparseMatrixC m(rows, cols);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

void write_triplets(std::ostream& out, const SparseMatrixC& m, double offset) {
  Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor, std::ptrdiff_t> rows = m;
  rows.makeCompressed();
  std::ostringstream body;
  body << std::setprecision(17);
  body << "# cfe sparse triplet v1\n";
  body << rows.rows() << ' ' << rows.cols() << ' ' << rows.nonZeros() << ' ' << offset << '\n';
  for (std::ptrdiff_t i = 0; i < rows.outerSize(); ++i) {
    for (decltype(rows)::InnerIterator it(rows, i); it; ++it) {
      body << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    }
  }
  out << body.str();
}

TripletData read_triplets(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  TripletData data;
  std::ptrdiff_t nnz = 0;
  if (!next_line()) throw ConfigError("triplet file: missing header");
  {
    std::istringstream header(line);
    if (!(header >> data.rows >> data.cols >> nnz >> data.offset)) {
      throw ConfigError("triplet file line " + std::to_string(line_no) + ": malformed header");
    }
  }
  data.entries.reserve(static_cast<std::size_t>(nnz));
  for (std::ptrdiff_t e = 0; e < nnz; ++e) {
    if (!next_line()) throw ConfigError("triplet file: expected " + std::to_string(nnz) + " entries");
    std::istringstream row(line);
    std::ptrdiff_t i = 0;
    std::ptrdiff_t j = 0;
    double re = 0.0;
    double im = 0.0;
    if (!(row >> i >> j >> re >> im) || i < 0 || j < 0 || i >= data.rows || j >= data.cols) {
      throw ConfigError("triplet file line " + std::to_string(line_no) + ": malformed entry");
    }
    data.entries.emplace_back(i, j, std::complex<double>(re, im));
  }
  return data;
}

}  // namespace cfe
