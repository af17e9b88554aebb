// Serial reference against the OpenMP sweeps. Thread count is the benchmark argument;
// 1 runs the serial path.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "magstep/criterion.hpp"
#include "magstep/fiber1d.hpp"
#include "magstep/reduced2d.hpp"
#include "magstep/sweep.hpp"

using namespace magstep;

namespace {

const AxisGrid kAlpha{0.1, 3.04, 24}, kGamma{0.0, 1.5708, 24}, kA{-1.0, 0.99, 24};

void BM_RegionScanSerial(benchmark::State& state) {
  theta0();  // warm the memo outside the timing
  for (auto _ : state) {
    auto cells = region_scan_serial(kAlpha, kGamma, kA, LambdaVariant::Theta0LowerBound);
    benchmark::DoNotOptimize(cells.data());
  }
}

void BM_RegionScanParallel(benchmark::State& state) {
  theta0();
  int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto cells = region_scan(kAlpha, kGamma, kA, LambdaVariant::Theta0LowerBound, {}, threads);
    benchmark::DoNotOptimize(cells.data());
  }
}

// Band samples: independent reduced 2D eigenproblems, the expensive sweep.
void BM_BandSamples(benchmark::State& state) {
  const StepFieldParams p{std::numbers::pi / 2, std::numbers::pi / 4, -0.5};
  const int threads = static_cast<int>(state.range(0));
  SigmaOptions quick;
  quick.mesh_error = false;
  Resolution res;
  res.h2d = 0.3;
  const double taus[] = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
  for (auto _ : state) {
    auto f = [&](std::size_t i) { return sigma(p, taus[i], res, quick).sigma; };
    auto out = threads == 1 ? serial_map(std::size(taus), f) : parallel_map(std::size(taus), f, threads);
    benchmark::DoNotOptimize(out.data());
  }
}

// Fiber curve: many cheap 1D problems.
void BM_MuCurve(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  std::vector<double> xis;
  for (int i = 0; i < 64; ++i) xis.push_back(-2.0 + 6.0 * i / 63);
  for (auto _ : state) {
    auto f = [&](std::size_t i) { return mu(-0.37, xis[i]); };
    auto out = threads == 1 ? serial_map(xis.size(), f) : parallel_map(xis.size(), f, threads);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_RegionScanSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RegionScanParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BandSamples)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(1);
BENCHMARK(BM_MuCurve)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
