#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cfe/coherent.hpp"
#include "cfe/errors.hpp"

namespace {

using cfe::cd;
using cfe::CoherentField;
using cfe::SpatialGrid;
constexpr double kPi = std::numbers::pi;

std::vector<double> random_phases(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<double> out(n);
  for (auto& x : out) x = u(rng);
  return out;
}

TEST(ExponentG, ConstantPhasesGiveVolumeTimesProduct) {
  const SpatialGrid grid(1, 2.0, 8);
  const auto a = CoherentField::from_grid(grid, 0.7, std::vector<double>(8, 0.3));
  const auto b = CoherentField::from_grid(grid, 1.1, std::vector<double>(8, 1.0));
  const cd g = cfe::exponent_g(a, b);
  const cd expect = 2.0 * 0.7 * 1.1 * std::polar(1.0, 0.7);
  EXPECT_NEAR(std::abs(g - expect), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(cfe::exponent_g(a, a) - cd(2.0 * 0.49)), 0.0, 1e-14);
}

TEST(ExponentG, CosinePhaseAgainstBesselSeries) {
  // alpha = r, beta = r exp(i c cos(2 pi x / L)); the integral is V r^2 J0-like:
  // (1/L) int exp(i c cos) dx = sum_m (i c)^{2m}/(2m)! * C(2m, m) / 4^m = J0(c).
  // With M grid points the trapezoid rule is exact up to aliasing of order c^M / M!.
  const double L = 3.0, r = 0.8, c = 0.9;
  const int m = 32;
  const SpatialGrid grid(1, L, m);
  std::vector<double> ph(m);
  for (int j = 0; j < m; ++j) ph[static_cast<std::size_t>(j)] = c * std::cos(2.0 * kPi * j / m);
  const auto a = CoherentField::from_grid(grid, r, std::vector<double>(m, 0.0));
  const auto b = CoherentField::from_grid(grid, r, ph);
  double series = 0.0, term = 1.0;
  for (int k = 0; k < 30; ++k) {
    if (k > 0) term *= -(c * c) / (4.0 * k * k);
    series += term;
  }
  EXPECT_NEAR(std::abs(cfe::exponent_g(a, b) - cd(L * r * r * series)), 0.0, 1e-14);
}

TEST(Overlap, HermitianAndNormPositive) {
  std::mt19937_64 rng(7);
  const SpatialGrid grid(1, 1.5, 16);
  for (int t = 0; t < 20; ++t) {
    const auto a = CoherentField::from_grid(grid, 0.9, random_phases(16, rng));
    const auto b = CoherentField::from_grid(grid, 1.2, random_phases(16, rng));
    const auto ab = cfe::overlap(a, b).value;
    const auto ba = cfe::overlap(b, a).value;
    EXPECT_LE(std::abs(ab - std::conj(ba)), 1e-14 * std::abs(ab));
    const auto aa = cfe::overlap(a, a).value;
    EXPECT_NEAR(aa.imag(), 0.0, 1e-15);
    EXPECT_NEAR(aa.real(), std::exp(1.5 * 0.81), 1e-13);
  }
}

TEST(Overlap, OverflowCarriesExponent) {
  const SpatialGrid grid(1, 1000.0, 4);
  const auto a = CoherentField::from_grid(grid, 1.0, std::vector<double>(4, 0.0));
  try {
    (void)cfe::overlap(a, a);
    FAIL() << "expected RangeError";
  } catch (const cfe::RangeError& e) {
    EXPECT_DOUBLE_EQ(e.exponent().real(), 1000.0);
  }
}

TEST(Overlap, GridMismatchIsRejected) {
  const auto a = CoherentField::from_grid(SpatialGrid(1, 1.0, 4), 1.0, std::vector<double>(4, 0.0));
  const auto b = CoherentField::from_grid(SpatialGrid(1, 1.0, 8), 1.0, std::vector<double>(8, 0.0));
  EXPECT_THROW((void)cfe::exponent_g(a, b), cfe::ConfigError);
}

TEST(CoherentField, RejectsBadMagnitudeAndSampleCount) {
  const SpatialGrid grid(1, 1.0, 4);
  EXPECT_THROW(CoherentField::from_grid(grid, 0.0, std::vector<double>(4, 0.0)), cfe::ConfigError);
  EXPECT_THROW(CoherentField::from_grid(grid, std::nan(""), std::vector<double>(4, 0.0)), cfe::ConfigError);
  EXPECT_THROW(CoherentField::from_grid(grid, 1.0, std::vector<double>(3, 0.0)), cfe::ConfigError);
}

TEST(CoherentField, ModesRoundTripThroughDft) {
  std::mt19937_64 rng(11);
  const SpatialGrid grid(2, 1.0, 6);
  const auto a = CoherentField::from_grid(grid, 1.0, random_phases(36, rng));
  const auto modes = a.dft_modes();
  const auto b = CoherentField::from_dft_modes(grid, 1.0, modes);
  for (std::size_t j = 0; j < 36; ++j) EXPECT_NEAR(a.phases()[j], b.phases()[j], 1e-13);
}

TEST(CoherentField, LatticeModesEvaluateDirectSum) {
  const cfe::ModeLattice lat(1, 2.0, 3);
  const SpatialGrid grid(1, 2.0, 8);
  // phi(x) = 2 Re(z e^{i k x}) with k = pi
  const cd z(0.3, -0.2);
  std::vector<cd> modes{std::conj(z), 0.1, z};
  const auto f = CoherentField::from_modes(grid, 1.0, lat, modes);
  for (std::size_t j = 0; j < 8; ++j) {
    const double x = 0.25 * static_cast<double>(j);
    const double expect = 0.1 + 2.0 * (z * std::polar(1.0, kPi * x)).real();
    EXPECT_NEAR(f.phases()[j], expect, 1e-15);
  }
  std::vector<cd> asym{z, 0.1, z};
  EXPECT_THROW(CoherentField::from_modes(grid, 1.0, lat, asym), cfe::ConfigError);
  const SpatialGrid coarse(1, 2.0, 2);
  EXPECT_THROW(CoherentField::from_modes(coarse, 1.0, lat, modes), cfe::ConfigError);
}

double factorial(unsigned n) { return std::tgamma(n + 1.0); }

TEST(NumberProjection, ClosedFormMatchesPower) {
  const cd g(1.3, -0.4);
  for (unsigned n = 0; n <= 10; ++n) {
    const cd expect = std::pow(g, static_cast<double>(n)) / factorial(n);
    EXPECT_LE(std::abs(cfe::projected_power(g, n) - expect), 1e-14 * std::max(1.0, std::abs(expect)));
  }
  EXPECT_EQ(cfe::projected_power(g, 0), cd(1.0));
}

TEST(NumberProjection, QuadratureEqualsAliasedSum) {
  // Direct evaluation of sum over m = n (mod mq) of g^m / m!.
  const cd g(2.5, 1.5);
  for (unsigned mq : {3u, 5u, 8u}) {
    for (unsigned n = 0; n < 6; ++n) {
      cd direct = 0.0;
      for (unsigned m = n % mq; m < 80; m += mq) direct += std::pow(g, static_cast<double>(m)) / factorial(m);
      const cd quad = cfe::projected_quadrature(g, n, mq);
      EXPECT_LE(std::abs(quad - direct), 1e-13 * std::exp(std::abs(g))) << "mq=" << mq << " n=" << n;
      if (n < mq) {
        const cd tail = cfe::aliasing_tail(g, n, mq);
        EXPECT_LE(std::abs(quad - cfe::projected_power(g, n) - tail), 1e-13 * std::exp(std::abs(g)));
        EXPECT_LE(std::abs(tail), cfe::aliasing_tail_bound(std::abs(g), n, mq) * (1 + 1e-12));
      }
    }
  }
}

TEST(NumberProjection, GenericIntegrandAndErrors) {
  // f(theta) = exp(i theta * 3) projects onto N = 3 only.
  const auto f = [](double th) { return std::polar(1.0, 3.0 * th); };
  EXPECT_NEAR(std::abs(cfe::phase_projection(f, 3, 16) - cd(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cfe::phase_projection(f, 2, 16)), 0.0, 1e-15);
  EXPECT_THROW((void)cfe::phase_projection(f, 0, 1), cfe::ConfigError);
  EXPECT_THROW((void)cfe::projected_power(cd(1e5), 200), cfe::RangeError);
}

TEST(NumberProjection, FieldOverloadsAgree) {
  std::mt19937_64 rng(3);
  const SpatialGrid grid(1, 1.0, 16);
  const auto a = CoherentField::from_grid(grid, 1.0, random_phases(16, rng));
  const auto b = CoherentField::from_grid(grid, 1.0, random_phases(16, rng));
  const cd g = cfe::exponent_g(a, b);
  EXPECT_EQ(cfe::number_overlap_closed(a, b, 4), cfe::projected_power(g, 4));
  EXPECT_LE(std::abs(cfe::number_overlap_quadrature(a, b, 4, 64) - cfe::projected_power(g, 4)), 1e-15);
}

TEST(KernelGram, HermitianPositiveAndProjected) {
  std::mt19937_64 rng(5);
  const SpatialGrid grid(1, 1.0, 8);
  std::vector<CoherentField> states;
  for (int i = 0; i < 5; ++i) states.push_back(CoherentField::from_grid(grid, 0.8, random_phases(8, rng)));
  const auto k = cfe::kernel_gram(states);
  const auto k2 = cfe::kernel_gram(states, 2u);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      const auto& a = states[static_cast<std::size_t>(i)];
      const auto& b = states[static_cast<std::size_t>(j)];
      EXPECT_EQ(k(i, j), std::exp(cfe::exponent_g(a, b)));
      EXPECT_EQ(k2(i, j), cfe::projected_power(cfe::exponent_g(a, b), 2));
      EXPECT_LE(std::abs(k(i, j) - std::conj(k(j, i))), 1e-14 * std::abs(k(i, j)));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

}  // namespace
