#include <complex>
#include <sstream>

#include <gtest/gtest.h>

#include "cfe/errors.hpp"
#include "cfe/sparse.hpp"

namespace {

using cd = std::complex<double>;

cfe::SparseColumn sample_column(std::size_t j) {
  cfe::SparseColumn col;
  col.push_back({static_cast<std::ptrdiff_t>(j), cd(1.0 + static_cast<double>(j), -0.5)});
  if (j + 2 < 40) col.push_back({static_cast<std::ptrdiff_t>(j + 2), cd(0.1 / 3.0, 1e-300)});
  return col;
}

TEST(BuildByColumns, ThreadCountDoesNotChangeBits) {
  const auto one = cfe::build_by_columns(40, 1, sample_column);
  for (unsigned t : {2u, 3u, 8u}) {
    const auto many = cfe::build_by_columns(40, t, sample_column);
    ASSERT_EQ(many.nonZeros(), one.nonZeros());
    std::ostringstream a, b;
    cfe::write_triplets(a, one, 0.25);
    cfe::write_triplets(b, many, 0.25);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Triplets, RoundTripIsExact) {
  const auto m = cfe::build_by_columns(40, 2, sample_column);
  std::ostringstream out;
  cfe::write_triplets(out, m, -1.0 / 3.0);
  std::istringstream in(out.str());
  const auto back = cfe::read_triplets(in);
  EXPECT_EQ(back.rows, 40);
  EXPECT_EQ(back.cols, 40);
  EXPECT_EQ(back.offset, -1.0 / 3.0);
  const auto again = back.to_matrix();
  EXPECT_EQ(cfe::max_abs(again - m), 0.0);
}

TEST(Triplets, HeaderAndRowMajorOrder) {
  cfe::SparseColumn c0{{1, cd(2.0, 0.0)}};
  cfe::SparseColumn c1{{0, cd(3.0, 0.0)}, {1, cd(4.0, 1.0)}};
  const auto m = cfe::build_by_columns(2, 1, [&](std::size_t j) { return j == 0 ? c0 : c1; });
  std::ostringstream out;
  cfe::write_triplets(out, m, 0.0);
  EXPECT_EQ(out.str(),
            "# cfe sparse triplet v1\n"
            "2 2 3 0\n"
            "0 1 3 0\n"
            "1 0 2 0\n"
            "1 1 4 1\n");
}

TEST(Triplets, ParseErrorsNameTheLine) {
  std::istringstream in("# cfe sparse triplet v1\n2 2 1 0\n0 5 1 0\n");
  try {
    (void)cfe::read_triplets(in);
    FAIL();
  } catch (const cfe::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Prune, DropsRelativeSmallEntries) {
  cfe::SparseColumn c0{{0, cd(1.0, 0.0)}, {1, cd(1e-17, 0.0)}, {2, cd(0.0, 0.0)}};
  const auto m = cfe::build_by_columns(3, 1, [&](std::size_t j) { return j == 0 ? c0 : cfe::SparseColumn{}; });
  const auto p = cfe::prune(m, 1e-15);
  EXPECT_EQ(p.nonZeros(), 1);
  EXPECT_EQ(cfe::max_abs(p), 1.0);
}

}  // namespace
