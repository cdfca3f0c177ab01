#include "cfe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/tools/roots.hpp>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "cfe/errors.hpp"

namespace cfe {
namespace {

using cd = std::complex<double>;

constexpr double kDefectiveThreshold = 1e-10;

std::vector<std::size_t> sort_order(const std::vector<cd>& w, double tie_tolerance) {
  double scale = 1.0;
  for (const cd& v : w) scale = std::max(scale, std::abs(v));
  const double tol = tie_tolerance * scale;
  // Quantised keys keep the comparison a strict weak ordering.
  std::vector<long long> re_key(w.size());
  std::vector<long long> im_key(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    re_key[i] = std::llround(w[i].real() / tol);
    im_key[i] = std::llround(std::abs(w[i].imag()) / tol);
  }
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (re_key[a] != re_key[b]) return re_key[a] > re_key[b];
    return im_key[a] < im_key[b];
  });
  return order;
}

void check_dense_size(std::ptrdiff_t n, const EigenOptions& options) {
  if (n > options.dense_limit) {
    throw SolverError("operator dimension " + std::to_string(n) + " exceeds the dense limit " +
                      std::to_string(options.dense_limit));
  }
}

std::string format_complex(cd v) {
  std::ostringstream s;
  s << std::setprecision(17) << v.real() << (v.imag() < 0 ? "" : "+") << v.imag() << "i";
  return s.str();
}

}  // namespace

Decomposition decompose(const Eigen::MatrixXcd& a, const EigenOptions& options) {
  const auto n = static_cast<lapack_int>(a.rows());
  check_dense_size(a.rows(), options);
  Eigen::MatrixXcd work = a;
  std::vector<cd> w(static_cast<std::size_t>(n));
  Eigen::MatrixXcd vl;
  Eigen::MatrixXcd vr;
  const bool left = options.want_vectors && options.want_left;
  if (options.want_vectors) vr.resize(n, n);
  if (left) vl.resize(n, n);
  cd dummy{};
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, left ? 'V' : 'N', options.want_vectors ? 'V' : 'N', n, work.data(),
                    std::max<lapack_int>(n, 1), w.data(), left ? vl.data() : &dummy, left ? n : 1,
                    options.want_vectors ? vr.data() : &dummy, options.want_vectors ? n : 1);
  if (info != 0) throw SolverError("zgeev failed with info = " + std::to_string(info));

  const auto order = sort_order(w, options.tie_tolerance);
  Decomposition d;
  d.values.reserve(order.size());
  for (std::size_t i : order) d.values.push_back(w[i]);
  if (options.want_vectors) {
    d.right.resize(n, n);
    for (lapack_int j = 0; j < n; ++j) d.right.col(j) = vr.col(static_cast<Eigen::Index>(order[static_cast<std::size_t>(j)]));
  }
  if (left) {
    d.left.resize(n, n);
    for (lapack_int j = 0; j < n; ++j) d.left.col(j) = vl.col(static_cast<Eigen::Index>(order[static_cast<std::size_t>(j)]));

    // Bi-orthogonalise cluster by cluster: distinct eigenvalues are already
    // orthogonal, degenerate ones need L_c <- L_c G^{-H} with G = L_c^H R_c.
    double scale = 1.0;
    for (const cd& v : d.values) scale = std::max(scale, std::abs(v));
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (lapack_int i = 0; i < n; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      std::vector<Eigen::Index> cluster;
      for (lapack_int j = i; j < n; ++j) {
        if (!used[static_cast<std::size_t>(j)] &&
            std::abs(d.values[static_cast<std::size_t>(j)] - d.values[static_cast<std::size_t>(i)]) <=
                options.cluster_tolerance * scale) {
          cluster.push_back(j);
          used[static_cast<std::size_t>(j)] = true;
        }
      }
      const auto m = static_cast<Eigen::Index>(cluster.size());
      Eigen::MatrixXcd lc(n, m);
      Eigen::MatrixXcd rc(n, m);
      for (Eigen::Index c = 0; c < m; ++c) {
        lc.col(c) = d.left.col(cluster[static_cast<std::size_t>(c)]);
        rc.col(c) = d.right.col(cluster[static_cast<std::size_t>(c)]);
      }
      const Eigen::MatrixXcd g = lc.adjoint() * rc;
      // Columns come back with unit norm, so a tiny singular value of G means the left
      // and right spaces are (numerically) orthogonal, i.e. a Jordan block.
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
      if (svd.singularValues().minCoeff() < kDefectiveThreshold) {
        throw SolverError("eigenvalue cluster near " + format_complex(d.values[static_cast<std::size_t>(i)]) +
                          " is defective; left/right vectors cannot be bi-orthogonalised");
      }
      const Eigen::MatrixXcd fixed = lc * g.inverse().adjoint();
      for (Eigen::Index c = 0; c < m; ++c) d.left.col(cluster[static_cast<std::size_t>(c)]) = fixed.col(c);
    }
  }
  return d;
}

std::vector<EigenPair> eigen_spectrum(const OperatorMatrix& op, std::size_t count, const EigenOptions& options) {
  const Eigen::MatrixXcd a = op.dense();
  EigenOptions opts = options;
  opts.want_vectors = true;
  const Decomposition d = decompose(a, opts);
  const std::size_t take = std::min(count, d.values.size());
  std::vector<EigenPair> pairs;
  pairs.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    EigenPair p;
    p.eigenvalue = d.values[i];
    p.right = d.right.col(static_cast<Eigen::Index>(i));
    p.right /= p.right.norm();
    if (opts.want_left) {
      p.left = d.left.col(static_cast<Eigen::Index>(i));
      p.left /= std::conj(p.left.dot(p.right));
    }
    p.residual = (a * p.right - p.eigenvalue * p.right).norm();
    if (!(p.residual <= opts.residual_tolerance)) {
      throw SolverError("eigenpair " + std::to_string(i) + " residual " + std::to_string(p.residual) +
                            " exceeds tolerance",
                        p.residual);
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<cd> eigenvalues(const OperatorMatrix& op, const EigenOptions& options) {
  EigenOptions opts = options;
  opts.want_vectors = false;
  opts.want_left = false;
  return decompose(op.dense(), opts).values;
}

EigenPair ground_state(const OperatorMatrix& op, const EigenOptions& options) {
  auto pairs = eigen_spectrum(op, 1, options);
  if (pairs.empty()) throw SolverError("empty operator has no ground state");
  return std::move(pairs.front());
}

double calibrate_mu(const ModelParams& params, const ModeLattice& lattice, const HermiteBasis& basis,
                    OperatorVariant variant, const EigenOptions& options) {
  params.validate(lattice);
  const double n = params.n_particles;
  const double closed = -params.gamma_at(lattice.zero_index()) * n;
  if (variant == OperatorVariant::weak || params.n_particles == 0) return closed;

  EigenOptions opts = options;
  opts.want_left = false;
  auto ground_at = [&](double u0) {
    ModelParams p = variant == OperatorVariant::scaled ? scaled_params(params) : params;
    p.set_u0(lattice, u0);
    return ground_state(assemble_full(p, lattice, basis), opts).eigenvalue.real();
  };
  const double width = std::max(1.0, std::abs(closed));
  double lo = closed - width;
  double hi = closed + width;
  double f_lo = ground_at(lo);
  double f_hi = ground_at(hi);
  for (int expand = 0; expand < 40 && f_lo * f_hi > 0.0; ++expand) {
    lo -= width * std::pow(2.0, expand);
    hi += width * std::pow(2.0, expand);
    f_lo = ground_at(lo);
    f_hi = ground_at(hi);
  }
  if (f_lo * f_hi > 0.0) {
    throw SolverError("calibrate_mu: could not bracket a zero of the ground eigenvalue");
  }
  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(ground_at, lo, hi, f_lo, f_hi,
                                                        boost::math::tools::eps_tolerance<double>(50), max_iter);
  const double root = 0.5 * (a + b);
  const double residual = std::abs(ground_at(root));
  if (residual > 1e-10) {
    throw SolverError("calibrate_mu: ground eigenvalue at root is " + std::to_string(residual), residual);
  }
  return root;
}

cd energy_from_eigenvalue(cd lambda, const ModelParams& /*params*/, double hbar2_over_2m) {
  if (!(hbar2_over_2m > 0.0)) throw ConfigError("hbar^2/(2m) must be positive");
  return hbar2_over_2m * (-lambda);
}

cd PerturbationSeries::evaluate(double epsilon, std::size_t max_order) const {
  cd sum = 0.0;
  double power = 1.0;
  for (std::size_t j = 0; j < orders.size() && j <= max_order; ++j) {
    sum += power * orders[j];
    power *= epsilon;
  }
  return sum;
}

PerturbationSeries perturbation_series(const OperatorMatrix& op0, const OperatorMatrix& op1,
                                       std::size_t max_order, const EigenOptions& options) {
  if (op0.dimension() != op1.dimension()) throw ConfigError("perturbation operators differ in dimension");
  EigenOptions opts = options;
  opts.want_vectors = true;
  opts.want_left = true;
  const Decomposition d = decompose(op0.dense(), opts);
  const auto n = static_cast<Eigen::Index>(d.values.size());
  const cd e0 = d.values.front();
  for (Eigen::Index j = 1; j < n; ++j) {
    if (std::abs(e0 - d.values[static_cast<std::size_t>(j)]) < 1e-8) {
      throw SolverError("ground level is degenerate with level " + std::to_string(j) + " (gap " +
                        std::to_string(std::abs(e0 - d.values[static_cast<std::size_t>(j)])) + ")");
    }
  }
  const Eigen::MatrixXcd v = op1.dense();
  const Eigen::VectorXcd right0 = d.right.col(0);
  const Eigen::VectorXcd left0 = d.left.col(0);
  // denominators 1/(e0 - lambda_j), zero on the ground level (reduced resolvent).
  Eigen::VectorXcd inv_gap(n);
  inv_gap(0) = 0.0;
  for (Eigen::Index j = 1; j < n; ++j) inv_gap(j) = 1.0 / (e0 - d.values[static_cast<std::size_t>(j)]);

  PerturbationSeries series;
  series.orders.push_back(e0);
  std::vector<Eigen::VectorXcd> psi{right0};
  for (std::size_t order = 1; order <= max_order; ++order) {
    const Eigen::VectorXcd v_psi = v * psi[order - 1];
    const cd e_n = left0.dot(v_psi);
    series.orders.push_back(e_n);
    Eigen::VectorXcd rhs = v_psi;
    for (std::size_t m = 1; m <= order; ++m) rhs -= series.orders[m] * psi[order - m];
    const Eigen::VectorXcd projected = d.left.adjoint() * rhs;
    psi.push_back(d.right * inv_gap.cwiseProduct(projected));
  }
  return series;
}

namespace {

double matched_distance(std::span<const cd> a, std::span<const cd> b, bool conjugate) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const cd& x : a) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(x - (conjugate ? std::conj(b[j]) : b[j]));
      if (dist < best) {
        best = dist;
        best_j = j;
      }
    }
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double conjugate_multiset_distance(std::span<const cd> a, std::span<const cd> b) {
  return matched_distance(a, b, true);
}

double multiset_distance(std::span<const cd> a, std::span<const cd> b) { return matched_distance(a, b, false); }

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void write_spectrum_csv(std::ostream& out, std::span<const EigenPair> pairs) {
  std::ostringstream s;
  s << std::setprecision(17) << "index,re,im,residual\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    s << i << ',' << pairs[i].eigenvalue.real() << ',' << pairs[i].eigenvalue.imag() << ',' << pairs[i].residual
      << '\n';
  }
  out << s.str();
}

void write_series_csv(std::ostream& out, const PerturbationSeries& series) {
  std::ostringstream s;
  s << std::setprecision(17) << "order,re,im\n";
  for (std::size_t j = 0; j < series.orders.size(); ++j) {
    s << j << ',' << series.orders[j].real() << ',' << series.orders[j].imag() << '\n';
  }
  out << s.str();
}

}  // namespace cfe
