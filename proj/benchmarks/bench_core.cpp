#include "drs/drs.hpp"

#include <benchmark/benchmark.h>

using namespace drs;

namespace {

const Dataset& housing() {
    static const Dataset d = normalize_minmax(load_csv(DRS_DATA_DIR "/housing.csv")).data;
    return d;
}

void BM_FitTree(benchmark::State& state) {
    const auto& d = housing();
    const auto bag = bagging_sample(d.n_instances, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_tree(d, bag, TreeParams{}));
    }
}
BENCHMARK(BM_FitTree)->Unit(benchmark::kMicrosecond);

void BM_GenerateEnsemble(benchmark::State& state) {
    const auto& d = housing();
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_ensemble(d, static_cast<std::size_t>(state.range(0)), TreeParams{}, 7));
    }
}
BENCHMARK(BM_GenerateEnsemble)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_FindNeighbors(benchmark::State& state) {
    const auto& d = housing();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_neighbors(d.row(i), d, static_cast<std::size_t>(state.range(0))));
        i = (i + 1) % d.n_instances;
    }
}
BENCHMARK(BM_FindNeighbors)->Arg(1)->Arg(10)->Arg(50);

void BM_ScoreAll(benchmark::State& state) {
    const auto& d = housing();
    const auto ens = generate_ensemble(d, 100, TreeParams{}, 3);
    const auto pm = predict_matrix(ens, d);
    const auto region = build_region(d.row(0), d, pm, 10);
    const auto q = ens.predict_all(d.row(0));
    const auto m = static_cast<Measure>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_all(m, region, q));
    }
    state.SetLabel(to_string(m));
}
BENCHMARK(BM_ScoreAll)->DenseRange(1, 8);

void BM_Replication(benchmark::State& state) {
    RunConfig c;
    c.n_members = 20;
    c.folds = 5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_replication(c, load_csv(DRS_DATA_DIR "/housing.csv"), 1));
    }
}
BENCHMARK(BM_Replication)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
