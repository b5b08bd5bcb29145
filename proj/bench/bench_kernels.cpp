#include <benchmark/benchmark.h>

#include "reskern/ensemble.hpp"
#include "reskern/kernel.hpp"
#include "reskern/reference.hpp"
#include "reskern/rng.hpp"

// OpenMP hot paths against their single-threaded reference twins. Run with
// OMP_NUM_THREADS to see the scaling; both sides produce bit-identical
// results (the unit tests assert it), so this measures speed alone.

using namespace reskern;

namespace {

Matrix gaussian_data(int n, int d, std::uint64_t seed) {
  auto eng = rng::make_engine(seed);
  Matrix data(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) data(i, j) = rng::normal(eng);
  return data;
}

EncoderConfig bench_config() {
  EncoderConfig config;
  config.units = 100;
  config.delta = 0.5;
  config.feature_fraction = 0.5;
  config.master_seed = 7;
  return config;
}

}  // namespace

static void bm_encode(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix data = gaussian_data(n, 16, 1);
  const EnsembleModel model = train_ensemble(data, bench_config());
  for (auto _ : state) {
    SparseCode code = encode(model, data);
    benchmark::DoNotOptimize(code.active.data());
  }
}
BENCHMARK(bm_encode)->Arg(200)->Arg(800);

static void bm_encode_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix data = gaussian_data(n, 16, 1);
  const EnsembleModel model = train_ensemble(data, bench_config());
  for (auto _ : state) {
    SparseCode code = reference::encode(model, data);
    benchmark::DoNotOptimize(code.active.data());
  }
}
BENCHMARK(bm_encode_reference)->Arg(200)->Arg(800);

static void bm_resample_gram(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix data = gaussian_data(n, 16, 2);
  const SparseCode codes = encode(train_ensemble(data, bench_config()), data);
  for (auto _ : state) {
    KernelMatrix kernel = build_resample_kernel(codes);
    benchmark::DoNotOptimize(kernel.values.data());
  }
}
BENCHMARK(bm_resample_gram)->Arg(200)->Arg(800);

static void bm_resample_gram_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix data = gaussian_data(n, 16, 2);
  const SparseCode codes = encode(train_ensemble(data, bench_config()), data);
  for (auto _ : state) {
    Matrix gram = reference::resample_gram(codes);
    benchmark::DoNotOptimize(gram.data());
  }
}
BENCHMARK(bm_resample_gram_reference)->Arg(200)->Arg(800);

static void bm_rbf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix data = gaussian_data(n, 16, 3);
  RbfParams params;
  params.scale_reference = average_pairwise_distance(data);
  for (auto _ : state) {
    KernelMatrix kernel = build_rbf_kernel(data, params);
    benchmark::DoNotOptimize(kernel.values.data());
  }
}
BENCHMARK(bm_rbf)->Arg(200)->Arg(800);

static void bm_rbf_reference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix data = gaussian_data(n, 16, 3);
  const double sigma = average_pairwise_distance(data);
  for (auto _ : state) {
    Matrix kernel = reference::rbf_kernel(data, sigma);
    benchmark::DoNotOptimize(kernel.data());
  }
}
BENCHMARK(bm_rbf_reference)->Arg(200)->Arg(800);

BENCHMARK_MAIN();
