// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include "laxtower/kernels.hpp"
#include "laxtower/random.hpp"

using namespace laxtower;
namespace k = laxtower::kernels;

namespace {

std::vector<Complex> modes(int band, std::uint64_t seed) {
  Rng rng(seed);
  const FourierField f = rng.field(band);
  return {f.modes().begin(), f.modes().end()};
}

std::vector<FourierField> laurent(int degrees, int band, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FourierField> c;
  for (int i = 0; i < degrees; ++i) c.push_back(rng.field(band));
  return c;
}

template <auto Convolve>
void BM_convolve(benchmark::State& state) {
  const int band = static_cast<int>(state.range(0));
  const auto a = modes(band, 1), b = modes(band, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Convolve(a, b));
  state.SetComplexityN(band);
}

template <auto Synthesize>
void BM_synthesize(benchmark::State& state) {
  const int band = static_cast<int>(state.range(0));
  const auto a = modes(band, 3);
  for (auto _ : state) benchmark::DoNotOptimize(Synthesize(a, 4 * band + 1));
}

template <auto Analyze>
void BM_analyze(benchmark::State& state) {
  const int band = static_cast<int>(state.range(0));
  const auto v = k::serial::synthesize(modes(band, 4), 4 * band + 1);
  for (auto _ : state) benchmark::DoNotOptimize(Analyze(v, band));
}

template <auto Product>
void BM_laurent_product(benchmark::State& state) {
  const int band = static_cast<int>(state.range(0));
  const auto a = laurent(8, band, 5), b = laurent(8, band, 6);
  for (auto _ : state) benchmark::DoNotOptimize(Product(a, b));
}

}  // namespace

BENCHMARK(BM_convolve<k::serial::convolve>)->Name("convolve/serial")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_convolve<k::omp::convolve>)->Name("convolve/omp")->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_synthesize<k::serial::synthesize>)->Name("synthesize/serial")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_synthesize<k::omp::synthesize>)->Name("synthesize/omp")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_analyze<k::serial::analyze>)->Name("analyze/serial")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_analyze<k::omp::analyze>)->Name("analyze/omp")->RangeMultiplier(4)->Range(16, 256);
BENCHMARK(BM_laurent_product<k::serial::laurent_product>)->Name("laurent_product/serial")->Arg(16)->Arg(64);
BENCHMARK(BM_laurent_product<k::omp::laurent_product>)->Name("laurent_product/omp")->Arg(16)->Arg(64);

BENCHMARK_MAIN();
