#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toedit/corpus.hpp"
#include "toedit/prior.hpp"

namespace toedit::testing {

/// Parameters of a toy language: a sparse first-order Markov chain over
/// `vocab` words with Zipf-weighted successors, interleaved with fixed
/// multi-word idioms that make some continuations near-deterministic.
struct LanguageSpec {
    std::size_t vocab = 400;
    std::size_t branching = 6;
    std::size_t idioms = 40;
    std::size_t idiom_length = 5;
    double idiom_rate = 0.12;
    std::uint64_t seed = 1;
    std::string word_prefix = "w";
};

class SyntheticLanguage {
public:
    explicit SyntheticLanguage(LanguageSpec spec);

    /// `n_docs` documents of exactly `doc_len` words each.
    Corpus generate(std::size_t n_docs, std::size_t doc_len, std::uint64_t seed, const std::string& id_prefix,
                    Origin origin = Origin::human) const;

private:
    LanguageSpec spec_;
    std::vector<std::vector<std::pair<std::size_t, double>>> successors_;
    std::vector<std::vector<std::size_t>> idioms_;
};

/// Fixed arbitrary distribution used to exercise sampling rules.
class TableModel final : public PriorModel {
public:
    explicit TableModel(std::vector<double> probs) : probs_(std::move(probs)) {}

    std::size_t vocab_size() const override { return probs_.size(); }
    std::string tokenizer_id() const override { return {}; }
    TopKDistribution next_token_dist(std::span<const TokenId>, std::size_t k) const override;
    double token_prob(std::span<const TokenId>, TokenId token) const override { return probs_.at(token); }

private:
    std::vector<double> probs_;
};

Corpus corpus_from_texts(const std::vector<std::string>& texts, const std::string& id_prefix = "d",
                         Origin origin = Origin::human);

}  // namespace toedit::testing
