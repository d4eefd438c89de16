#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "toedit/prior.hpp"

using namespace toedit;

namespace {

Corpus fixture(std::size_t docs) { return testing::SyntheticLanguage({}).generate(docs, 100, 1, "d"); }

void BM_TrainNgram(benchmark::State& state) {
    const auto corpus = fixture(static_cast<std::size_t>(state.range(0)));
    const auto tok = Tokenizer::build_whitespace(corpus);
    for (auto _ : state) benchmark::DoNotOptimize(train_ngram_prior(corpus, tok, 3, 0.75));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_TrainNgram)->Arg(100)->Arg(1000);

void BM_ScoreSequence(benchmark::State& state) {
    const auto corpus = fixture(200);
    const auto tok = Tokenizer::build_whitespace(corpus);
    const auto prior = train_ngram_prior(corpus, tok, 3, 0.75);
    const auto seq = tok.tokenize(corpus[0]);
    for (auto _ : state) benchmark::DoNotOptimize(score_sequence(prior, seq));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.size()));
}
BENCHMARK(BM_ScoreSequence);

void BM_TopK(benchmark::State& state) {
    const auto corpus = fixture(200);
    const auto tok = Tokenizer::build_whitespace(corpus);
    const auto prior = train_ngram_prior(corpus, tok, 3, 0.75);
    const auto seq = tok.tokenize(corpus[0]);
    const std::span<const TokenId> context(seq.tokens.data(), 10);
    for (auto _ : state) benchmark::DoNotOptimize(prior.next_token_dist(context, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_TopK)->Arg(8)->Arg(64);

}  // namespace
