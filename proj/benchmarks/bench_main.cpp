// Copyright (C) 2026 The microtube Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <random>

#include <benchmark/benchmark.h>

#include "microtube/anchor_pyramid.hpp"
#include "microtube/eval.hpp"
#include "microtube/linking.hpp"
#include "microtube/proposals.hpp"
#include "microtube/synth.hpp"
#include "microtube/transition.hpp"

namespace {

using namespace microtube;

const AnchorSet& ssd() {
    static const AnchorSet anchors = build_pyramid(PyramidConfig::ssd300());
    return anchors;
}

void BM_Iou(benchmark::State& state) {
    const Box a{0.1, 0.2, 0.5, 0.6};
    const Box b{0.3, 0.1, 0.7, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(iou(a, b));
}
BENCHMARK(BM_Iou);

void BM_BuildPyramid(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_pyramid(PyramidConfig::ssd300()));
}
BENCHMARK(BM_BuildPyramid);

void BM_Estimate(benchmark::State& state) {
    MotionSpec spec;
    spec.delta = 5;
    const std::vector<MicroTube> gts = extract_microtubes(generate_dataset(spec, 20, 1), 5);
    const auto shards = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(estimate_sharded(gts, ssd(), shards));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(gts.size()));
}
BENCHMARK(BM_Estimate)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_EnumerateDiagonal(benchmark::State& state) {
    const BinaryTransitions b = diagonal_transitions(ssd(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_proposals(b, ssd()));
}
BENCHMARK(BM_EnumerateDiagonal)->Unit(benchmark::kMicrosecond);

void BM_BestOverlaps(benchmark::State& state) {
    const std::vector<AnchorMicroTube> props = enumerate_proposals(diagonal_transitions(ssd(), 1), ssd());
    const std::vector<MicroTube> gts = extract_microtubes(generate_dataset(MotionSpec{}, 2, 2), 1);
    for (auto _ : state) benchmark::DoNotOptimize(best_overlaps(gts, props));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(gts.size() * props.size()));
}
BENCHMARK(BM_BestOverlaps)->Unit(benchmark::kMillisecond);

void BM_Trim(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
    for (double& s : scores) s = unit(rng);
    for (auto _ : state) benchmark::DoNotOptimize(trim(scores, 0.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Trim)->RangeMultiplier(8)->Range(64, 32768)->Complexity(benchmark::oN);

std::vector<ScoredMicroTube> noisy_detections(const Dataset& d) {
    DetectionNoise noise;
    noise.sigma = 0.01;
    noise.distractor_rate = 2.0;
    noise.num_classes = 3;
    return simulate_detections(d, ssd(), diagonal_transitions(ssd(), 1), 1, noise, 4);
}

Dataset three_class_dataset() {
    MotionSpec spec;
    spec.num_classes = 3;
    spec.tubes_per_video = 2;
    return generate_dataset(spec, 20, 4);
}

void BM_LinkAll(benchmark::State& state) {
    const std::vector<ScoredMicroTube> dets = noisy_detections(three_class_dataset());
    const auto threads = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(link_all(dets, LinkParams{}, threads));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(dets.size()));
}
BENCHMARK(BM_LinkAll)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_AvgMap(benchmark::State& state) {
    const Dataset d = three_class_dataset();
    const std::vector<ActionPath> paths = link_all(noisy_detections(d), LinkParams{});
    for (auto _ : state) benchmark::DoNotOptimize(avg_map(paths, d));
}
BENCHMARK(BM_AvgMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
