#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cfe/errors.hpp"
#include "cfe/hermite.hpp"

namespace {

TEST(HermiteHe, LowOrderClosedForms) {
  for (double t : {-1.7, 0.0, 0.3, 2.2}) {
    EXPECT_DOUBLE_EQ(cfe::hermite_he(0, t), 1.0);
    EXPECT_DOUBLE_EQ(cfe::hermite_he(1, t), t);
    EXPECT_NEAR(cfe::hermite_he(2, t), t * t - 1.0, 1e-14);
    EXPECT_NEAR(cfe::hermite_he(3, t), t * t * t - 3.0 * t, 1e-13);
    EXPECT_NEAR(cfe::hermite_he(4, t), t * t * t * t - 6.0 * t * t + 3.0, 1e-13);
  }
}

// Coefficient n of psi in the basis through the dual functional
// c_n = int psi(x) He_n(x/sigma) dx / (sigma sqrt(2 pi) n!), by trapezoid on a wide interval.
double dual_coefficient(double s, double sigma, int n) {
  const double half = 14.0 * std::max(s, sigma);
  const int steps = 6000;
  const double h = 2.0 * half / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = -half + h * i;
    const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    sum += w * std::exp(-x * x / (2.0 * s * s)) * cfe::hermite_he(n, x / sigma);
  }
  return sum * h / (sigma * std::sqrt(2.0 * std::numbers::pi) * std::tgamma(n + 1.0));
}

TEST(GaussianCoefficients, MatchDualProjection) {
  for (double v : {0.5, 1.0, 1.7}) {
    const auto c = cfe::gaussian_coefficients(v, 8);
    ASSERT_EQ(c.size(), 9u);
    for (int n = 0; n <= 8; ++n) {
      EXPECT_NEAR(c[static_cast<std::size_t>(n)], dual_coefficient(std::sqrt(v), 1.0, n), 1e-12)
          << "v=" << v << " n=" << n;
    }
  }
  const auto unit = cfe::gaussian_coefficients(1.0, 4);
  EXPECT_EQ(unit, (std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0}));
}

TEST(HermiteBasis, WidthsMatchStationaryVariance) {
  const cfe::ModeLattice lat(1, 2.0 * std::numbers::pi, 5);
  cfe::ModelParams p;
  p.gamma = 0.8;
  const cfe::HermiteBasis b(lat, p, 3);
  ASSERT_EQ(b.coordinate_count(), 4u);
  EXPECT_EQ(b.dimension(), 256u);
  for (std::size_t c = 0; c < 4; ++c) {
    const double k2 = b.coordinates().coordinate(c).k_squared;
    EXPECT_DOUBLE_EQ(b.sigma(c), std::sqrt(0.8 / (2.0 * k2)));
  }
  const cfe::HermiteBasis wide(lat, p, 3, 1.5);
  EXPECT_DOUBLE_EQ(wide.sigma(0), 1.5 * b.sigma(0));
}

TEST(HermiteBasis, FlatIndexRoundTrip) {
  const cfe::ModeLattice lat(1, 1.0, 5);
  const cfe::HermiteBasis b(lat, cfe::ModelParams{}, std::vector<int>{2, 1, 3, 0});
  EXPECT_EQ(b.dimension(), 3u * 2u * 4u * 1u);
  for (std::size_t i = 0; i < b.dimension(); ++i) {
    const auto n = b.multi_index(i);
    EXPECT_EQ(b.flat_index(n), i);
    EXPECT_TRUE(b.contains(n));
  }
  // first coordinate slowest
  EXPECT_EQ(b.multi_index(1), (std::vector<int>{0, 0, 1, 0}));
  EXPECT_EQ(b.multi_index(8), (std::vector<int>{1, 0, 0, 0}));
  EXPECT_FALSE(b.contains(std::vector<int>{0, 2, 0, 0}));
  EXPECT_FALSE(b.contains(std::vector<int>{-1, 0, 0, 0}));
}

TEST(HermiteBasis, RejectsBadCutoffs) {
  const cfe::ModeLattice lat(1, 1.0, 3);
  EXPECT_THROW(cfe::HermiteBasis(lat, cfe::ModelParams{}, -1), cfe::ConfigError);
  EXPECT_THROW(cfe::HermiteBasis(lat, cfe::ModelParams{}, std::vector<int>{1}), cfe::ConfigError);
  EXPECT_THROW(cfe::HermiteBasis(lat, cfe::ModelParams{}, 1, 0.0), cfe::ConfigError);
}

}  // namespace
