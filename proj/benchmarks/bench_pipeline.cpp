#include <benchmark/benchmark.h>

#include "corrpus/babi_harness.hpp"
#include "corrpus/prompt_forge.hpp"
#include "corrpus/re3_harness.hpp"
#include "corrpus/update_dsl.hpp"

using namespace corrpus;

namespace {

const std::filesystem::path kAssets = CORRPUS_BENCH_ASSETS;

const std::vector<BabiSample>& shipped() {
    static const auto samples = parse_babi_file(kAssets / "data" / "babi" / "qa2_test.txt");
    return samples;
}

PromptStyle style_arg(const benchmark::State& state) { return static_cast<PromptStyle>(state.range(0)); }

void BM_Oracle(benchmark::State& state) {
    const auto& samples = shipped();
    for (auto _ : state) {
        for (const auto& s : samples) benchmark::DoNotOptimize(oracle_solve(s, ActionLexicon::standard()));
    }
    state.SetItemsProcessed(state.iterations() * samples.size());
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

// Program source of a long synthetic story, per style.
std::string long_program(PromptStyle style, int length) {
    return pretty_print(oracle_solve(generate_synthetic(9, length), ActionLexicon::standard(), style).program);
}

void BM_Parse(benchmark::State& state) {
    auto style = style_arg(state);
    auto source = long_program(style, static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(parse_program(source, style));
    state.SetBytesProcessed(state.iterations() * source.size());
}
BENCHMARK(BM_Parse)->ArgsProduct({{0, 1, 2}, {20, 200}});

void BM_Evaluate(benchmark::State& state) {
    auto style = style_arg(state);
    auto solved = oracle_solve(generate_synthetic(9, static_cast<int>(state.range(1))), ActionLexicon::standard(),
                               style);
    auto w0 = WorldState::init(SchemaPreset::babi_task2(), solved.story_case.entities);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(solved.program, w0, AbstractFunctionTable::babi_task2()));
    }
}
BENCHMARK(BM_Evaluate)->ArgsProduct({{0, 1, 2}, {20, 200}});

void BM_Render(benchmark::State& state) {
    auto style = style_arg(state);
    auto exemplar = load_exemplar(kAssets, PresetId::babi_task2, style);
    auto story = case_for_sample(shipped()[0], ActionLexicon::standard());
    for (auto _ : state) {
        benchmark::DoNotOptimize(render(story, style, SchemaPreset::babi_task2(), exemplar).request());
    }
}
BENCHMARK(BM_Render)->DenseRange(0, 3);

void BM_RocAuc(benchmark::State& state) {
    std::vector<std::pair<double, bool>> scored;
    for (int i = 0; i < state.range(0); ++i) scored.emplace_back((i * 7919 % 101) / 100.0, i % 3 == 0);
    for (auto _ : state) benchmark::DoNotOptimize(roc_auc(scored));
}
BENCHMARK(BM_RocAuc)->Arg(200)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
