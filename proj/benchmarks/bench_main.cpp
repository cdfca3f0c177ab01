#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "cfe/coherent.hpp"
#include "cfe/fock.hpp"
#include "cfe/mode_operator.hpp"
#include "cfe/sparse.hpp"
#include "cfe/spectral.hpp"

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cfe::ModelParams bench_params(const cfe::ModeLattice& lat, double epsilon) {
  cfe::ModelParams p;
  p.gamma = 0.5;
  p.n_particles = 3;
  p.epsilon = epsilon;
  p.set_u0(lat, -1.5);
  return p;
}

// range(0): n_max per coordinate on the two-pair lattice; range(1): threads.
void BM_AssembleFull(benchmark::State& state) {
  const cfe::ModeLattice lat(1, kTwoPi, 5);
  const auto p = bench_params(lat, 0.2);
  const cfe::HermiteBasis basis(lat, p, static_cast<int>(state.range(0)));
  cfe::AssemblyOptions opts;
  opts.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    auto op = cfe::assemble_full(p, lat, basis, opts);
    benchmark::DoNotOptimize(op.matrix.nonZeros());
  }
  state.counters["dim"] = static_cast<double>(basis.dimension());
}
BENCHMARK(BM_AssembleFull)->Args({3, 1})->Args({4, 1})->Args({6, 1})->Args({6, 4})->Unit(benchmark::kMillisecond);

void BM_DenseSpectrum(benchmark::State& state) {
  const cfe::ModeLattice lat(1, kTwoPi, 5);
  const auto p = bench_params(lat, 0.2);
  const cfe::HermiteBasis basis(lat, p, static_cast<int>(state.range(0)));
  const auto op = cfe::assemble_full(p, lat, basis);
  for (auto _ : state) {
    auto values = cfe::eigenvalues(op);
    benchmark::DoNotOptimize(values.data());
  }
  state.counters["dim"] = static_cast<double>(basis.dimension());
}
BENCHMARK(BM_DenseSpectrum)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

// range(0): lattice points per side in one dimension; range(1): particles.
void BM_FockBuild(benchmark::State& state) {
  const cfe::ModeLattice lat(1, kTwoPi, static_cast<int>(state.range(0)));
  const auto basis = cfe::enumerate_basis(lat.size(), static_cast<int>(state.range(1)));
  const std::vector<double> uk(lat.size(), 0.01);
  for (auto _ : state) {
    auto h = cfe::build_hamiltonian(lat, uk, 0.0, 0.0, basis);
    benchmark::DoNotOptimize(h.matrix.nonZeros());
  }
  state.counters["dim"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_FockBuild)->Args({3, 3})->Args({5, 4})->Args({7, 5})->Unit(benchmark::kMillisecond);

void BM_Overlap(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  const cfe::SpatialGrid grid(1, 1.0, points);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::vector<double> pa(points), pb(points);
  for (auto& x : pa) x = phase(rng);
  for (auto& x : pb) x = phase(rng);
  const auto a = cfe::CoherentField::from_grid(grid, 1.0, pa);
  const auto b = cfe::CoherentField::from_grid(grid, 1.0, pb);
  for (auto _ : state) benchmark::DoNotOptimize(cfe::overlap(a, b).value);
}
BENCHMARK(BM_Overlap)->Arg(16)->Arg(256)->Arg(4096);

void BM_ProjectionQuadrature(benchmark::State& state) {
  const auto mq = static_cast<unsigned>(state.range(0));
  const std::complex<double> g(2.5, -1.5);
  for (auto _ : state) benchmark::DoNotOptimize(cfe::projected_quadrature(g, 6, mq));
}
BENCHMARK(BM_ProjectionQuadrature)->Arg(16)->Arg(64)->Arg(256);

void BM_TripletExport(benchmark::State& state) {
  const cfe::ModeLattice lat(1, kTwoPi, 5);
  const auto p = bench_params(lat, 0.2);
  const cfe::HermiteBasis basis(lat, p, 4);
  const auto op = cfe::assemble_full(p, lat, basis);
  for (auto _ : state) {
    std::ostringstream out;
    cfe::write_triplets(out, op.matrix, op.offset);
    benchmark::DoNotOptimize(out.str().size());
  }
}
BENCHMARK(BM_TripletExport)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
