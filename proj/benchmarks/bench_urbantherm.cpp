#include <benchmark/benchmark.h>

#include <chrono>
#include <map>

#include "urbantherm/analysis.hpp"
#include "urbantherm/synthgen.hpp"

using namespace urbantherm;

namespace {

const synth::SyntheticFrame& sample_frame() {
    static const auto frame = [] {
        auto spec = synth::default_scene();
        const std::vector<Timestamp> ts = {std::chrono::sys_days{std::chrono::year{2022} / 3 / 1} +
                                           std::chrono::hours{7}};
        return synth::generate(spec, ts).at(0);
    }();
    return frame;
}

const TemperatureField& sample_field() {
    static const auto field = correct_emissivity(counts_to_temperature(sample_frame().frame), sample_frame().mask,
                                                 EmissivityTable{});
    return field;
}

void BM_CountsToTemperature(benchmark::State& state) {
    const auto& f = sample_frame();
    for (auto _ : state)
        benchmark::DoNotOptimize(counts_to_temperature(f.frame));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.frame.counts.size()));
}
BENCHMARK(BM_CountsToTemperature);

void BM_CorrectEmissivity(benchmark::State& state) {
    const auto raw = counts_to_temperature(sample_frame().frame);
    for (auto _ : state)
        benchmark::DoNotOptimize(correct_emissivity(raw, sample_frame().mask, EmissivityTable{}));
}
BENCHMARK(BM_CorrectEmissivity);

void BM_ExtractStats(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(extract_stats(sample_field(), sample_frame().mask));
}
BENCHMARK(BM_ExtractStats);

void BM_Evaluate(benchmark::State& state) {
    const auto& gt = sample_frame().mask;
    const auto pred = synth::perturb_mask(gt, {.seed = 1});
    for (auto _ : state)
        benchmark::DoNotOptimize(evaluate(gt, pred));
}
BENCHMARK(BM_Evaluate);

void BM_DetectAndRegions(benchmark::State& state) {
    for (auto _ : state) {
        const auto map = detect(sample_field(), sample_frame().mask, FeatureClass::building);
        benchmark::DoNotOptimize(regions(map, &sample_field()));
    }
}
BENCHMARK(BM_DetectAndRegions);

void BM_AnalyzeFrame(benchmark::State& state) {
    const std::map<std::string, LabelMask> none;
    const RunConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(analyze_frame(sample_frame().frame, sample_frame().mask, none, cfg));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AnalyzeFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
