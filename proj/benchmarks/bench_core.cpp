// Microbenchmarks for the hot paths of the decode stack. These exist to
// catch throughput regressions, not to prove absolute numbers; run with
// --benchmark_min_time for stable readings.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "salca/hbm_model.hpp"
#include "salca/pipeline_sim.hpp"
#include "salca/quantizer.hpp"
#include "salca/rng.hpp"
#include "salca/sparse_select.hpp"
#include "salca/tensor.hpp"

using namespace salca;

namespace {

std::vector<std::uint8_t> random_codes(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> codes(n);
    for (auto& v : codes) {
        v = static_cast<std::uint8_t>(rng() % 256);
    }
    return codes;
}

void bm_maxpool(benchmark::State& state) {
    const auto codes = random_codes(static_cast<std::size_t>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(maxpool_stride1(codes, 7));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_maxpool)->Arg(10240)->Arg(65536);

void bm_histogram_topk(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto codes = random_codes(n, 11);
    const std::size_t k = n / 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(histogram_topk(codes, k));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_histogram_topk)->Arg(10240)->Arg(65536);

void bm_estimate_relevance(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const std::size_t r = 64;
    std::mt19937_64 rng(3);
    std::normal_distribution<float> gauss(0.0f, 1.0f);
    std::vector<float> keys(n * r), query(r);
    for (auto& v : keys) {
        v = gauss(rng);
    }
    for (auto& v : query) {
        v = gauss(rng);
    }
    const QuantizedKeyCore coded_keys = quant_key_2bit_asym(Tensor::from_f32({n, r}, keys));
    const QuantizedQuery coded_query = quant_query_3bit_sym(query);
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_relevance(coded_query, coded_keys));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_estimate_relevance)->Arg(10240)->Arg(65536);

void bm_schedule_window(benchmark::State& state) {
    HbmConfig cfg;
    cfg.reorder_range = static_cast<std::size_t>(state.range(0));
    Rng rng(17);
    const auto window =
        make_index_window(rng, cfg.reorder_range, IndexDistribution::clustered, 4.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(schedule_window(window, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_schedule_window)->Arg(32)->Arg(128)->Arg(256);

void bm_simulate_decode_step(benchmark::State& state) {
    const PipelineConfig cfg;
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_decode_step(n, 0.05, cfg));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_simulate_decode_step)->Arg(16384)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
