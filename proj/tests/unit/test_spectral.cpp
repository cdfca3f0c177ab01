#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cfe/errors.hpp"
#include "cfe/spectral.hpp"

namespace {

using cd = std::complex<double>;
using cfe::ModeLattice;
using cfe::ModelParams;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

cfe::OperatorMatrix wrap(const Eigen::MatrixXcd& m) {
  cfe::OperatorMatrix op;
  op.matrix = m.sparseView();
  return op;
}

Eigen::MatrixXcd random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
  return m;
}

TEST(Decompose, BiorthogonalOnNonNormalMatrix) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXcd a = random_matrix(7, rng);
  const auto d = cfe::decompose(a);
  const Eigen::MatrixXcd lam = Eigen::Map<const Eigen::VectorXcd>(d.values.data(), 7).asDiagonal();
  EXPECT_LT((a * d.right - d.right * lam).norm(), 1e-12);
  EXPECT_LT((d.left.adjoint() * a - lam * d.left.adjoint()).norm(), 1e-11);
  EXPECT_LT((d.left.adjoint() * d.right - Eigen::MatrixXcd::Identity(7, 7)).norm(), 1e-12);
  for (std::size_t i = 1; i < d.values.size(); ++i) EXPECT_GE(d.values[i - 1].real(), d.values[i].real());
}

TEST(Decompose, RepeatedEigenvalueClusterIsBiorthogonalised) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXcd s = random_matrix(5, rng);
  Eigen::VectorXcd diag(5);
  diag << 1.0, 1.0, -2.0, 0.5, 1.0;
  const Eigen::MatrixXcd a = s * diag.asDiagonal() * s.inverse();
  const auto d = cfe::decompose(a);
  EXPECT_LT((d.left.adjoint() * d.right - Eigen::MatrixXcd::Identity(5, 5)).norm(), 1e-9);
  EXPECT_NEAR(std::abs(d.values[0] - 1.0), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(d.values[4] + 2.0), 0.0, 1e-10);
}

TEST(Decompose, DefectiveClusterIsReported) {
  Eigen::MatrixXcd jordan = Eigen::MatrixXcd::Zero(3, 3);
  jordan(0, 0) = jordan(1, 1) = 1.0;
  jordan(0, 1) = 1.0;
  jordan(2, 2) = -1.0;
  EXPECT_THROW((void)cfe::decompose(jordan), cfe::SolverError);
}

TEST(EigenSpectrum, WeakOperatorGivesLadderWithSmallResiduals) {
  const ModeLattice lat(1, kTwoPi, 5);
  ModelParams p;
  p.gamma = 0.5;
  p.n_particles = 2;
  const cfe::HermiteBasis basis(lat, p, 2);
  const auto op = cfe::assemble_weak(p, lat, basis);
  const auto pairs = cfe::eigen_spectrum(op, 6);
  ASSERT_EQ(pairs.size(), 6u);
  const double eb = p.ebar(lat);
  // Ladder with k^2 in {1, 4}: 0, -1, -1, -2, -2, -2 (then -3 ...), shifted by -ebar.
  const double expect[] = {0, -1, -1, -2, -2, -2};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(pairs[i].eigenvalue.real(), expect[i] - eb, 1e-12);
    EXPECT_LT(pairs[i].residual, 1e-12);
    EXPECT_NEAR(std::abs(pairs[i].left.dot(pairs[i].right) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(pairs[i].right.norm(), 1.0, 1e-12);
  }
  const auto all = cfe::eigenvalues(op);
  EXPECT_EQ(all.size(), basis.dimension());
  EXPECT_NEAR(cfe::ground_state(op).eigenvalue.real(), -eb, 1e-13);
}

TEST(EigenSpectrum, DenseLimitIsEnforced) {
  const ModeLattice lat(1, kTwoPi, 5);
  ModelParams p;
  const cfe::HermiteBasis basis(lat, p, 3);
  cfe::EigenOptions opts;
  opts.dense_limit = 100;
  EXPECT_THROW((void)cfe::eigen_spectrum(cfe::assemble_weak(p, lat, basis), 3, opts), cfe::SolverError);
}

TEST(CalibrateMu, ZeroesTheGroundEigenvalue) {
  const ModeLattice lat(1, kTwoPi, 5);
  ModelParams p;
  p.gamma = 0.5;
  p.n_particles = 3;
  p.epsilon = 0.2;
  const cfe::HermiteBasis basis(lat, p, 3);
  EXPECT_DOUBLE_EQ(cfe::calibrate_mu(p, lat, basis, cfe::OperatorVariant::weak), -1.5);
  const double u0 = cfe::calibrate_mu(p, lat, basis, cfe::OperatorVariant::full);
  auto q = p;
  q.set_u0(lat, u0);
  EXPECT_LT(std::abs(cfe::ground_state(cfe::assemble_full(q, lat, basis)).eigenvalue.real()), 1e-10);
}

TEST(EnergyFromEigenvalue, ScalesByHbarOverTwoM) {
  ModelParams p;
  EXPECT_EQ(cfe::energy_from_eigenvalue(cd(-2.0, 0.5), p, 0.25), cd(0.5, -0.125));
  EXPECT_THROW((void)cfe::energy_from_eigenvalue(cd(1.0), p, 0.0), cfe::ConfigError);
}

// Against exact eigenvalues of a generic small matrix pencil: the truncation error of
// the order-J series must fall off as epsilon^(J+1).
TEST(PerturbationSeries, ConvergesAtTheExpectedOrder) {
  std::mt19937_64 rng(9);
  Eigen::MatrixXcd a0 = random_matrix(6, rng) * 0.1;
  for (Eigen::Index i = 0; i < 6; ++i) a0(i, i) += cd(-1.0 * static_cast<double>(i), 0.0);
  const Eigen::MatrixXcd a1 = random_matrix(6, rng) * 0.3;
  const auto series = cfe::perturbation_series(wrap(a0), wrap(a1), 4);
  ASSERT_EQ(series.orders.size(), 5u);
  for (std::size_t order : {1u, 2u, 3u}) {
    std::vector<double> eps, err;
    for (double e : {0.005, 0.01, 0.02, 0.04}) {
      const Eigen::MatrixXcd a = a0 + e * a1;
      const cd exact = cfe::decompose(a, {.want_vectors = false, .want_left = false}).values.front();
      eps.push_back(e);
      err.push_back(std::abs(exact - series.evaluate(e, order)));
    }
    EXPECT_NEAR(cfe::loglog_slope(eps, err), static_cast<double>(order + 1), 0.15) << "order " << order;
  }
  EXPECT_EQ(series.evaluate(0.3, 0), series.orders[0]);
}

TEST(PerturbationSeries, FirstOrderVanishesForCubicDrift) {
  const ModeLattice lat(1, kTwoPi, 5);
  ModelParams p;
  p.gamma = 0.5;
  p.n_particles = 3;
  p.epsilon = 0.0;
  const cfe::HermiteBasis basis(lat, p, 3);
  const auto s = cfe::perturbation_series(cfe::assemble_full(p, lat, basis), cfe::cubic_perturbation(p, lat, basis), 2);
  EXPECT_LT(std::abs(s.orders[1]), 1e-12);
}

TEST(PerturbationSeries, DegenerateGroundIsRejected) {
  Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Identity(3, 3);
  a0(2, 2) = -1.0;
  EXPECT_THROW((void)cfe::perturbation_series(wrap(a0), wrap(a0), 2), cfe::SolverError);
}

TEST(MultisetDistance, MatchingAndConjugation) {
  const std::vector<cd> a{{1, 2}, {3, -1}, {0, 0}};
  const std::vector<cd> b{{0, 0}, {1, -2}, {3, 1}};
  EXPECT_EQ(cfe::conjugate_multiset_distance(a, b), 0.0);
  // greedy: (1,2)->(3,1), (3,-1)->(1,-2), (0,0)->(0,0)
  EXPECT_NEAR(cfe::multiset_distance(a, b), std::sqrt(5.0), 1e-15);
  EXPECT_TRUE(std::isinf(cfe::multiset_distance(a, std::vector<cd>{1.0})));
}

TEST(LoglogSlope, PowerLaw) {
  const std::vector<double> x{0.1, 0.2, 0.4, 0.8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 4));
  EXPECT_NEAR(cfe::loglog_slope(x, y), 4.0, 1e-12);
}

TEST(CsvWriters, ColumnsAndPrecision) {
  cfe::EigenPair p;
  p.eigenvalue = cd(-1.0 / 3.0, 0.0);
  p.residual = 1e-16;
  std::ostringstream out;
  cfe::write_spectrum_csv(out, std::span<const cfe::EigenPair>(&p, 1));
  EXPECT_EQ(out.str(), "index,re,im,residual\n0,-0.33333333333333331,0,9.9999999999999998e-17\n");
  cfe::PerturbationSeries s;
  s.orders = {cd(1.0, 0.0), cd(0.0, 0.1)};
  std::ostringstream o2;
  cfe::write_series_csv(o2, s);
  EXPECT_EQ(o2.str(), "order,re,im\n0,1,0\n1,0,0.10000000000000001\n");
}

}  // namespace
