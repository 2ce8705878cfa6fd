// Throughput of the hot paths: elliptic integrals, meshing, the MFS fit,
// Monte Carlo Newtonian potentials and BEM assembly/solve.
#include <benchmark/benchmark.h>

#include "coatlab/bem.hpp"
#include "coatlab/elliptic.hpp"
#include "coatlab/mesh.hpp"
#include "coatlab/overdet.hpp"
#include "coatlab/potential.hpp"

using namespace coatlab;

static void BM_EllipticPhiAll(benchmark::State& state) {
  const EllipticContext ctx(Vec3(1.0, 1.5, 2.0));
  double rho = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ctx.phi_all(rho));
    rho = rho < 10.0 ? rho * 1.01 : 0.1;
  }
}
BENCHMARK(BM_EllipticPhiAll);

static void BM_CarlsonRd(benchmark::State& state) {
  double z = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(carlson_rd(1.0, 2.0, z));
    z = z < 4.0 ? z + 1e-3 : 0.5;
  }
}
BENCHMARK(BM_CarlsonRd);

static void BM_MeshEllipsoid(benchmark::State& state) {
  const Ellipsoid e(Vec3(1.0, 1.5, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(mesh_ellipsoid(e, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MeshEllipsoid)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);

static void BM_MfsFitConfocal(benchmark::State& state) {
  const ShellGeometry shell = ShellGeometry::from_confocal(ConfocalPair(Ellipsoid(Vec3(1.0, 1.5, 2.0)), 1.0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(mfs_fit(shell).rho_fit);
}
BENCHMARK(BM_MfsFitConfocal)->Unit(benchmark::kMillisecond);

static void BM_NewtonianMc(benchmark::State& state) {
  const McDomain d = McDomain::from_ellipsoid(Ellipsoid(Vec3(1.0, 1.5, 2.0)));
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(newtonian_mc(d, Vec3(0.2, 0.1, 0.3), samples, 7).value);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_NewtonianMc)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_BemAssemble(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sphere_pair_system(1.0, 2.0, s)->panels());
}
BENCHMARK(BM_BemAssemble)->DenseRange(3, 4)->Unit(benchmark::kMillisecond);

static void BM_BemSolve(benchmark::State& state) {
  const auto sys = sphere_pair_system(1.0, 2.0, static_cast<int>(state.range(0)));
  const LayeredMedium m = LayeredMedium::isotropic(5.0, 1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_transmission(sys, m, Vec3::UnitZ()).charge_core);
}
BENCHMARK(BM_BemSolve)->DenseRange(3, 4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
