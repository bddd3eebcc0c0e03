#include <benchmark/benchmark.h>

#include "twmg/chaotic_source.hpp"
#include "twmg/pipeline.hpp"
#include "twmg/propagation.hpp"
#include "twmg/random.hpp"
#include "twmg/statistics.hpp"

using namespace twmg;

namespace {

ScalarField noise_field(std::size_t n, double pitch, double lambda) {
  auto rng = Xoshiro256::for_stream(1, 99, n);
  ScalarField f(n, n, pitch, lambda);
  for (auto& v : f.samples().values()) v = rng.complex_normal(1.0);
  return f;
}

void BM_LensImage2f2f(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScalarField obj = noise_field(n, 16e-6, 532e-9);
  const InteractionGeometry g = InteractionGeometry::default_setup();
  for (auto _ : state) benchmark::DoNotOptimize(lens_image_2f2f(obj, g));
}
BENCHMARK(BM_LensImage2f2f)->Arg(128)->Arg(256)->Arg(512);

void BM_FreePropagate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ScalarField f = noise_field(n, 16e-6, 1064e-9);
  const double z = state.range(1) ? 3 * critical_distance(f) : 0.5 * critical_distance(f);
  for (auto _ : state) benchmark::DoNotOptimize(free_propagate(f, z));
}
BENCHMARK(BM_FreePropagate)->ArgsProduct({{128, 256, 512}, {0, 1}})->ArgNames({"n", "single_fft"});

void BM_ChaoticShot(benchmark::State& state) {
  const InteractionGeometry g = InteractionGeometry::default_setup();
  SourceSpec spec;
  spec.direction_lattice = 16e-6 / g.fourier_focal;
  ChaoticImager imager(three_hole_mask(256, 256, 16e-6), g);
  imager.prepare(sample_directions(spec, 1, 0));
  std::uint64_t shot = 0;
  for (auto _ : state) benchmark::DoNotOptimize(imager.shot(sample_modes(spec, 1, shot++), {}));
}
BENCHMARK(BM_ChaoticShot)->Unit(benchmark::kMillisecond);

void BM_Correlate(benchmark::State& state) {
  auto rng = Xoshiro256::for_stream(2, 99, 0);
  std::vector<ShotRecord> shots(static_cast<std::size_t>(state.range(0)));
  for (auto& s : shots) {
    s.i1 = RealGrid(256, 256);
    s.i2 = RealGrid(256, 256);
    for (double& v : s.i1.values()) v = rng.uniform();
    for (double& v : s.i2.values()) v = rng.uniform();
  }
  for (auto _ : state) benchmark::DoNotOptimize(correlate(shots, PixelIndex{128, 128}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Correlate)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
