#include "cfe/params.hpp"

#include <cmath>
#include <string>

#include "cfe/errors.hpp"

namespace cfe {

void ModelParams::validate(const ModeLattice& lattice) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be positive (stable repulsive interaction)");
  }
  if (n_particles < 0) throw ConfigError("particle number must be non-negative");
  if (!std::isfinite(epsilon)) throw ConfigError("epsilon must be finite");
  if (!u_k.empty()) {
    if (u_k.size() != lattice.size()) {
      throw ConfigError("u_k has " + std::to_string(u_k.size()) + " entries, lattice has " +
                        std::to_string(lattice.size()) + " modes");
    }
    double scale = 1.0;
    for (const auto& u : u_k) scale = std::max(scale, std::abs(u));
    for (std::size_t i = 0; i < u_k.size(); ++i) {
      if (std::abs(u_k[lattice.negated(i)] - std::conj(u_k[i])) > 1e-12 * scale) {
        throw ConfigError("u_k is not conjugate-symmetric at mode " + std::to_string(i));
      }
    }
  }
  if (!gamma_k.empty()) {
    if (gamma_k.size() != lattice.size()) {
      throw ConfigError("gamma_k has " + std::to_string(gamma_k.size()) + " entries, lattice has " +
                        std::to_string(lattice.size()) + " modes");
    }
    for (std::size_t i = 0; i < gamma_k.size(); ++i) {
      if (!(gamma_k[i] > 0.0) || gamma_k[lattice.negated(i)] != gamma_k[i]) {
        throw ConfigError("gamma_k must be positive and even in k (mode " + std::to_string(i) + ")");
      }
    }
  }
}

void ModelParams::set_u0(const ModeLattice& lattice, double value) {
  if (u_k.empty()) u_k.assign(lattice.size(), {});
  u_k[lattice.zero_index()] = value;
}

double ModelParams::ebar(const ModeLattice& lattice) const {
  const double n = n_particles;
  return n * (u0(lattice) + gamma_at(lattice.zero_index()) * n);
}

bool ModelParams::constant_potential(const ModeLattice& lattice) const {
  for (std::size_t i = 0; i < u_k.size(); ++i) {
    if (i != lattice.zero_index() && u_k[i] != std::complex<double>{}) return false;
  }
  return true;
}

}  // namespace cfe
