// Copyright (c) 2026, hpi contributors
// SPDX-License-Identifier: Apache-2.0

#include "hpi/gbm.hpp"
#include "hpi/importance.hpp"
#include "hpi/metrics.hpp"
#include "hpi/random.hpp"
#include "hpi/synth.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

void BM_Auc(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    hpi::Rng rng(1);
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = rng.uniform();
        labels[i] = rng.uniform() < 0.3;
    }
    for (auto _ : state) benchmark::DoNotOptimize(hpi::auc(scores, labels));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);

// Importance of every axis on a q-axis grid with 4 values per axis.
void BM_ImportanceAllAxes(benchmark::State& state) {
    const auto q = static_cast<std::size_t>(state.range(0));
    hpi::Rng rng(2);
    std::vector<std::size_t> shape(q, 4);
    std::size_t n = 1;
    for (auto s : shape) n *= s;
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    const hpi::GridArray r(shape, v);
    for (auto _ : state) {
        for (std::size_t a = 0; a < q; ++a) {
            benchmark::DoNotOptimize(hpi::importance_before(r, a));
            benchmark::DoNotOptimize(hpi::importance_after(r, a));
        }
    }
}
BENCHMARK(BM_ImportanceAllAxes)->DenseRange(2, 6, 2);

void BM_GbmFit(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto data = hpi::synthesize(hpi::Generator::interaction, rows, 8, 3);
    hpi::GbmParams p;
    p.max_depth = 4;
    p.max_iteration = 50;
    for (auto _ : state) benchmark::DoNotOptimize(hpi::gbm_fit(data, p, 0));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * rows));
}
BENCHMARK(BM_GbmFit)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
