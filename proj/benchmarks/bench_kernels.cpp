#include <benchmark/benchmark.h>

#include <vector>

#include "t1forge/anatomy.hpp"
#include "t1forge/morphology.hpp"
#include "t1forge/phantom.hpp"
#include "t1forge/segmenter.hpp"
#include "t1forge/stats.hpp"
#include "t1forge/uncertainty.hpp"

using namespace t1forge;

namespace {

const PhantomTruth& phantom() {
    static const PhantomTruth truth = [] {
        PhantomSpec spec = default_phantom_spec();
        spec.noise_sd = 30.0;
        spec.seed = 3;
        return generate_phantom(spec);
    }();
    return truth;
}

void BM_SegmentMc(benchmark::State& state) {
    const int T = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment_mc(phantom().image, T, 11));
    }
    state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_SegmentMc)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_UncertaintyMap(benchmark::State& state) {
    const SegmentationSampleSet set = perturbed_mask_samples(phantom().image, phantom().mask,
                                                             static_cast<int>(state.range(0)), 5);
    for (auto _ : state) {
        const ProbabilityMaps p = mean_probability(set, ProbabilitySource::HardLabels);
        benchmark::DoNotOptimize(uncertainty_map(p, set));
    }
}
BENCHMARK(BM_UncertaintyMap)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Erode(benchmark::State& state) {
    const BinaryMask pool = select(phantom().mask, Label::LVBloodPool);
    for (auto _ : state) benchmark::DoNotOptimize(erode(pool));
}
BENCHMARK(BM_Erode);

void BM_ErodeToFraction(benchmark::State& state) {
    const BinaryMask pool = select(phantom().mask, Label::LVBloodPool);
    for (auto _ : state) benchmark::DoNotOptimize(erode_to_fraction(pool, 1.0 / 3.0));
}
BENCHMARK(BM_ErodeToFraction);

void BM_AnalyseAnatomy(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(analyse_anatomy(phantom().mask, phantom().image));
}
BENCHMARK(BM_AnalyseAnatomy)->Unit(benchmark::kMicrosecond);

void BM_BlandAltman(benchmark::State& state) {
    std::vector<double> x(static_cast<std::size_t>(state.range(0))), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = 900.0 + static_cast<double>(i % 97);
        y[i] = x[i] + static_cast<double>(i % 13) - 6.0;
    }
    for (auto _ : state) benchmark::DoNotOptimize(stats::bland_altman(x, y));
}
BENCHMARK(BM_BlandAltman)->Arg(1000)->Arg(15000);

}  // namespace

BENCHMARK_MAIN();
