#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "toedit/editor.hpp"

using namespace toedit;

namespace {

void BM_EditCorpus(benchmark::State& state) {
    const auto corpus = testing::SyntheticLanguage({}).generate(200, 100, 2, "d");
    const auto tok = Tokenizer::build_whitespace(corpus);
    const auto prior = train_ngram_prior(corpus, tok, 3, 0.75);
    EditPolicy policy;
    policy.p = 0.9;
    const auto jobs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(edit_corpus(corpus, tok, prior, policy, jobs));
    state.SetItemsProcessed(state.iterations() * 200 * 100);
}
BENCHMARK(BM_EditCorpus)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace
