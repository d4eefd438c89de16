#include "fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "toedit/random.hpp"

namespace toedit::testing {

SyntheticLanguage::SyntheticLanguage(LanguageSpec spec) : spec_(std::move(spec)) {
    Rng rng = make_rng(spec_.seed, "language");
    successors_.resize(spec_.vocab);
    for (auto& next : successors_) {
        for (std::size_t r = 0; r < spec_.branching; ++r)
            next.emplace_back(uniform_index(rng, spec_.vocab), 1.0 / std::pow(static_cast<double>(r + 1), 1.3));
    }
    idioms_.resize(spec_.idioms);
    for (auto& idiom : idioms_) {
        for (std::size_t i = 0; i < spec_.idiom_length; ++i) idiom.push_back(uniform_index(rng, spec_.vocab));
    }
}

Corpus SyntheticLanguage::generate(std::size_t n_docs, std::size_t doc_len, std::uint64_t seed,
                                   const std::string& id_prefix, Origin origin) const {
    std::vector<Document> docs;
    docs.reserve(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        Rng rng = make_rng(seed, id_prefix + std::to_string(d));
        std::vector<std::size_t> words;
        std::size_t current = uniform_index(rng, spec_.vocab);
        words.push_back(current);
        while (words.size() < doc_len) {
            if (uniform01(rng) < spec_.idiom_rate) {
                const auto& idiom = idioms_[uniform_index(rng, idioms_.size())];
                for (std::size_t w : idiom) {
                    if (words.size() == doc_len) break;
                    words.push_back(w);
                }
                current = words.back();
                continue;
            }
            const auto& next = successors_[current];
            double total = 0.0;
            for (const auto& [w, weight] : next) total += weight;
            double u = uniform01(rng) * total;
            current = next.back().first;
            for (const auto& [w, weight] : next) {
                if (u < weight) {
                    current = w;
                    break;
                }
                u -= weight;
            }
            words.push_back(current);
        }
        std::string text;
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (i) text += ' ';
            text += spec_.word_prefix + std::to_string(words[i]);
        }
        docs.push_back(Document{id_prefix + std::to_string(d), std::move(text), origin, {}});
    }
    return Corpus(std::move(docs), "synthetic language seed " + std::to_string(seed));
}

TopKDistribution TableModel::next_token_dist(std::span<const TokenId>, std::size_t k) const {
    std::vector<Candidate> all;
    for (std::size_t t = 0; t < probs_.size(); ++t)
        if (probs_[t] > 0.0) all.push_back({static_cast<TokenId>(t), probs_[t]});
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.prob > b.prob; });
    if (all.size() > k) all.resize(k);
    TopKDistribution out;
    for (const auto& c : all) out.mass += c.prob;
    out.candidates = std::move(all);
    return out;
}

Corpus corpus_from_texts(const std::vector<std::string>& texts, const std::string& id_prefix, Origin origin) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i)
        docs.push_back(Document{id_prefix + std::to_string(i), texts[i], origin, {}});
    return Corpus(std::move(docs));
}

}  // namespace toedit::testing
