#include "cfe/coherent.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "cfe/errors.hpp"

namespace cfe {
namespace {

// FFTW's planner is not reentrant; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<cd> transform(const SpatialGrid& grid, std::vector<cd> data, int sign) {
  std::vector<int> dims(static_cast<std::size_t>(grid.dimension()), grid.points_per_dim());
  std::vector<cd> out(data.size());
  auto* in_ptr = reinterpret_cast<fftw_complex*>(data.data());
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft(grid.dimension(), dims.data(), in_ptr, out_ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

void require_same_grid(const CoherentField& a, const CoherentField& b) {
  if (!(a.grid() == b.grid())) {
    throw ConfigError("coherent fields live on different grids");
  }
}

}  // namespace

CoherentField::CoherentField(SpatialGrid grid, double r, std::vector<double> phases)
    : grid_(std::move(grid)), r_(r), phases_(std::move(phases)) {
  if (!(r_ > 0.0) || !std::isfinite(r_)) {
    throw ConfigError("coherent magnitude r must be positive and finite");
  }
  if (phases_.size() != grid_.size()) {
    throw ConfigError("phase field has " + std::to_string(phases_.size()) +
                      " samples, grid has " + std::to_string(grid_.size()));
  }
}

CoherentField CoherentField::from_grid(const SpatialGrid& grid, double r, std::vector<double> phases) {
  return CoherentField(grid, r, std::move(phases));
}

CoherentField CoherentField::from_modes(const SpatialGrid& grid, double r, const ModeLattice& lattice,
                                        std::span<const cd> modes) {
  if (lattice.dimension() != grid.dimension() || lattice.box_length() != grid.box_length()) {
    throw ConfigError("mode lattice and spatial grid describe different boxes");
  }
  if (grid.points_per_dim() < lattice.modes_per_dim()) {
    throw ConfigError("grid with " + std::to_string(grid.points_per_dim()) +
                      " points per dimension cannot resolve " +
                      std::to_string(lattice.modes_per_dim()) + " modes per dimension");
  }
  if (modes.size() != lattice.size()) {
    throw ConfigError("expected " + std::to_string(lattice.size()) + " mode coefficients");
  }
  double scale = 0.0;
  for (const cd& m : modes) scale = std::max(scale, std::abs(m));
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (std::abs(modes[lattice.negated(i)] - std::conj(modes[i])) > 1e-12 * std::max(scale, 1.0)) {
      throw ConfigError("phase modes violate phi_{-k} = conj(phi_k) at mode " + std::to_string(i));
    }
  }

  std::vector<double> phases(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto x = grid.position(j);
    cd sum = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      const auto k = lattice.k_vector(i);
      double kx = 0.0;
      for (std::size_t d = 0; d < k.size(); ++d) kx += k[d] * x[d];
      sum += modes[i] * std::polar(1.0, kx);
    }
    phases[j] = sum.real();
  }
  return CoherentField(grid, r, std::move(phases));
}

CoherentField CoherentField::from_dft_modes(const SpatialGrid& grid, double r, std::span<const cd> modes) {
  if (modes.size() != grid.size()) {
    throw ConfigError("expected " + std::to_string(grid.size()) + " DFT coefficients");
  }
  const auto samples = transform(grid, std::vector<cd>(modes.begin(), modes.end()), FFTW_BACKWARD);
  std::vector<double> phases(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) phases[j] = samples[j].real();
  return CoherentField(grid, r, std::move(phases));
}

std::vector<cd> CoherentField::dft_modes() const {
  std::vector<cd> data(phases_.begin(), phases_.end());
  auto modes = transform(grid_, std::move(data), FFTW_FORWARD);
  const double inv = 1.0 / static_cast<double>(grid_.size());
  for (auto& m : modes) m *= inv;
  return modes;
}

cd exponent_g(const CoherentField& a, const CoherentField& b) {
  require_same_grid(a, b);
  cd sum = 0.0;
  for (std::size_t j = 0; j < a.phases().size(); ++j) {
    sum += std::conj(a.amplitude(j)) * b.amplitude(j);
  }
  return a.grid().cell_measure() * sum;
}

OverlapResult overlap(const CoherentField& a, const CoherentField& b) {
  const cd g = exponent_g(a, b);
  if (g.real() > std::log(std::numeric_limits<double>::max())) {
    throw RangeError("exp(G) overflows a double; use the exponent", g);
  }
  return {g, std::exp(g)};
}

cd projected_power(cd g, unsigned n) {
  cd value = 1.0;
  for (unsigned m = 1; m <= n; ++m) value *= g / static_cast<double>(m);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    const cd log_value = static_cast<double>(n) * std::log(g) - std::lgamma(n + 1.0);
    throw RangeError("G^N/N! overflows a double", log_value);
  }
  return value;
}

cd number_overlap_closed(const CoherentField& a, const CoherentField& b, unsigned n) {
  return projected_power(exponent_g(a, b), n);
}

cd phase_projection(const std::function<cd(double)>& f, unsigned n, unsigned mq) {
  if (mq < 2) throw ConfigError("phase quadrature needs at least 2 points");
  cd sum = 0.0;
  for (unsigned j = 0; j < mq; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / mq;
    const double winding = -theta * static_cast<double>(n % mq);
    sum += std::polar(1.0, winding) * f(theta);
  }
  return sum / static_cast<double>(mq);
}

cd projected_quadrature(cd g, unsigned n, unsigned mq) {
  return phase_projection([g](double theta) { return std::exp(g * std::polar(1.0, theta)); }, n, mq);
}

cd number_overlap_quadrature(const CoherentField& a, const CoherentField& b, unsigned n, unsigned mq) {
  if (mq < 2) throw ConfigError("phase quadrature needs at least 2 points");
  return projected_quadrature(exponent_g(a, b), n, mq);
}

cd aliasing_tail(cd g, unsigned n, unsigned mq) {
  if (mq < 1) throw ConfigError("aliasing period must be positive");
  // term holds G^m / m! for the running m.
  cd term = projected_power(g, n);
  cd tail = 0.0;
  double largest = 0.0;
  for (unsigned m = n + 1; m < n + 100000; ++m) {
    term *= g / static_cast<double>(m);
    if ((m - n) % mq == 0) {
      tail += term;
      largest = std::max(largest, std::abs(term));
      if (std::abs(term) <= std::numeric_limits<double>::epsilon() * 1e-3 * largest &&
          static_cast<double>(m) > std::abs(g)) {
        break;
      }
    }
    if (term == cd(0.0)) break;
  }
  return tail;
}

double aliasing_tail_bound(double abs_g, unsigned n, unsigned mq) {
  return std::abs(aliasing_tail(cd(abs_g, 0.0), n, mq));
}

Eigen::MatrixXcd kernel_gram(std::span<const CoherentField> states, std::optional<unsigned> n) {
  const auto size = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXcd gram(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      const auto& a = states[static_cast<std::size_t>(i)];
      const auto& b = states[static_cast<std::size_t>(j)];
      gram(i, j) = n ? number_overlap_closed(a, b, *n) : overlap(a, b).value;
    }
  }
  return gram;
}

}  // namespace cfe
