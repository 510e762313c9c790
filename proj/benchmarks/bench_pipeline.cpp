#include <benchmark/benchmark.h>

#include "blochspec/spectral.hpp"

using namespace blochspec;

namespace {

IonDensity bench_density() {
  return IonDensity::separable_sinc_gauss(0.125, 1.0, 1.0, 0.5);
}

void AssembleB(benchmark::State& state) {
  const IonDensity d = bench_density();
  const int N = static_cast<int>(state.range(0));
  const PlaneWaveBasis basis(N);
  const Vec3 theta(0.9, 1.7, 2.3);
  for (auto _ : state) {
    BlochOperatorSet ops = assemble_b(d, theta, basis);
    benchmark::DoNotOptimize(ops.Bmat.data());
  }
  state.SetLabel("D=" + std::to_string(2 * basis.size() + 6));
}
BENCHMARK(AssembleB)->DenseRange(1, 3);

void FiberSolveFull(benchmark::State& state) {
  const IonDensity d = bench_density();
  const int N = static_cast<int>(state.range(0));
  const Vec3 theta(0.9, 1.7, 2.3);
  for (auto _ : state) {
    FiberSolve fs = solve_fiber(d, theta, N);
    benchmark::DoNotOptimize(fs.spectral.omegas.data());
  }
}
BENCHMARK(FiberSolveFull)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void WienerMatrixSweep(benchmark::State& state) {
  const IonDensity d = bench_density();
  const int radius = static_cast<int>(state.range(0));
  const Vec3 theta(0.9, 1.7, 2.3);
  for (auto _ : state) {
    Matrix3d s = wiener_matrix(d, theta, radius);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(WienerMatrixSweep)->Arg(4)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
