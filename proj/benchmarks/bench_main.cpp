#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "nndc/binary_codes.hpp"
#include "nndc/knn.hpp"
#include "nndc/lsh.hpp"
#include "nndc/metric.hpp"
#include "nndc/synth.hpp"

namespace {

nndc::Dataset make_data(std::size_t n, std::size_t d, double s = 1.0, std::uint64_t seed = 1) {
  return nndc::gen_sparse_iid({n, d, s, nndc::ValueDistribution::kUniform01, seed});
}

void BM_LpDistanceDense(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const nndc::Dataset data = make_data(2, d);
  const double p = static_cast<double>(state.range(1)) / 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nndc::lp_distance(data.point(0), data.point(1), p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d));
}
BENCHMARK(BM_LpDistanceDense)->ArgsProduct({{64, 512, 4096}, {2, 3, 4}});

void BM_LpDistanceSparse(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const nndc::Dataset data = make_data(2, d, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nndc::lp_distance(data.point(0), data.point(1), 1.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d));
}
BENCHMARK(BM_LpDistanceSparse)->Arg(4096)->Arg(65536);

void BM_BruteForceKnn(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const nndc::Dataset data = make_data(n, 64);
  const nndc::Dataset queries = nndc::gen_queries({n, 64, 1.0, nndc::ValueDistribution::kUniform01, 1}, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nndc::brute_force_knn(data, queries, 10, 2.0));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * queries.size()));
}
BENCHMARK(BM_BruteForceKnn)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_HammingRank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto bits = static_cast<std::size_t>(state.range(1));
  const nndc::Dataset data = make_data(n, 128);
  const nndc::BinaryCodeIndex index = nndc::train_random_hash(data, bits, 7);
  const nndc::Dataset q = make_data(1, 128, 1.0, 99);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nndc::hamming_rank(index, q.point(0), n / 20));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_HammingRank)->ArgsProduct({{10'000, 100'000}, {32, 128}})->Unit(benchmark::kMicrosecond);

void BM_LshBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const nndc::Dataset data = make_data(n, 64);
  nndc::LshParams params;
  params.bits = 16;
  params.tables = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nndc::LshIndex::build(data, params));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * params.tables));
}
BENCHMARK(BM_LshBuild)->ArgsProduct({{10'000}, {1, 16}})->Unit(benchmark::kMillisecond);

void BM_LshQuery(benchmark::State& state) {
  const nndc::Dataset data = make_data(10'000, 64);
  nndc::LshParams params;
  params.bits = 16;
  params.tables = 16;
  params.width_scale = 4.0;
  const nndc::LshIndex index = nndc::LshIndex::build(data, params);
  const nndc::Dataset q = make_data(1, 64, 1.0, 99);
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.query(q.point(0)));
  }
}
BENCHMARK(BM_LshQuery)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
