#include <benchmark/benchmark.h>

#include "cdolab/path_runner.hpp"

using namespace cdolab;

namespace {

struct Setup {
    RatingLadder ladder{{0.3, 0.6, 1.0}};
    HjmmModel model{LevyTriplet(0.0, 0.0, LevyMeasure({{0.5, 1.0}}, Density::exp_tilted(2.0, 5.0))),
                    VolatilitySpec::constant(3, 0.1), Geometry{0.01, 301, 1.0, ladder}};
    ForwardSurface r0 = ForwardSurface::from_function(0.01, 301, 1.0, ladder, [](double, std::size_t i) {
        return 0.05 - 0.015 * static_cast<double>(i);
    });
    BatchOptions opts;

    explicit Setup(std::size_t n) {
        opts.n_paths = n;
        opts.seed = 7;
        opts.path.horizon = 1.0;
        opts.path.maturities = {2.0};
        opts.path.price_times = {0.0, 0.5, 1.0};
    }
};

void BM_BatchSerial(benchmark::State& state) {
    Setup s(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch_serial(s.model, s.r0, s.opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchParallel(benchmark::State& state) {
    Setup s(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_batch(s.model, s.r0, s.opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
