#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "toedit/corpus.hpp"
#include "toedit/prior.hpp"

namespace toedit {

/// Bins [e_i, e_{i+1}); values at or beyond the last edge count as overflow
/// unless `last_closed`, in which case the last edge itself falls in the
/// final bin. Values below the first edge go to the first bin.
struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    std::size_t overflow = 0;
    bool last_closed = false;

    Histogram() = default;
    explicit Histogram(std::vector<double> edges, bool last_closed = false);

    void add(double value);
    std::size_t bins() const noexcept { return counts.size(); }
    std::size_t observations() const noexcept { return total + overflow; }
};

/// 0, 2, ..., 100 with an overflow bucket above 100.
std::vector<double> default_ppl_edges();
/// 0, 0.1, ..., 1.0; the last bin is closed.
std::vector<double> unit_interval_edges(std::size_t bins = 10);

struct PplProfile {
    Histogram histogram;
    /// Perplexity per scored unit (document or chunk), in corpus order.
    std::vector<double> values;
    std::size_t skipped_empty = 0;
};

/// One observation per document (or per `chunk`-token window when chunk > 0).
PplProfile ppl_profile(const Corpus& corpus, const Tokenizer& tokenizer, const PriorModel& prior,
                       std::vector<double> edges = default_ppl_edges(), std::size_t chunk = 0,
                       std::size_t jobs = 1);

struct TokenProbProfile {
    Histogram histogram;
    /// Positions with probability >= 0.99.
    std::size_t high_confidence = 0;

    /// Share of tokens per bin in percent.
    std::vector<double> percentages() const;
};

/// One observation per token position: P(x_i | x_<i).
TokenProbProfile token_prob_profile(const Corpus& corpus, const Tokenizer& tokenizer, const PriorModel& prior,
                                    std::size_t jobs = 1);

/// Shannon entropy (nats) of the bin distribution, overflow excluded.
/// Throws ConfigError if the histogram is empty.
double histogram_entropy(const Histogram& h);

/// Linear-interpolated quantile of `values` (q in [0, 1]).
double quantile(std::vector<double> values, double q);

struct FeatureProfile {
    std::size_t buckets = 1;
    std::vector<std::size_t> n_orders;
    std::uint64_t hash_seed = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_ngrams = 0;
    /// Tokenizer that produced the ids; empty when unknown.
    std::string tokenizer_id;

    bool compatible_with(const FeatureProfile& other) const noexcept;
};

/// FNV-1a/64 of the n-gram (token ids as 4-byte little-endian words),
/// XOR hash_seed, mod buckets.
std::size_t ngram_bucket(std::span<const TokenId> ngram, std::uint64_t hash_seed, std::size_t buckets) noexcept;

FeatureProfile hash_ngram_features(const Corpus& corpus, const Tokenizer& tokenizer,
                                   const std::vector<std::size_t>& n_orders, std::size_t buckets,
                                   std::uint64_t hash_seed);

/// Text form: header line
/// "TOEDIT-FEATURES-v1 <B> <hash_seed> <n1,n2,...> <total> <tokenizer id or ->"
/// followed by one count per line.
void save_profile(const FeatureProfile& profile, const std::filesystem::path& path);
FeatureProfile load_profile(const std::filesystem::path& path);

struct NgramCount {
    std::vector<TokenId> ngram;
    std::uint64_t count = 0;

    friend bool operator==(const NgramCount&, const NgramCount&) = default;
};

/// Exact counts, count descending then lexicographic by token ids.
std::vector<NgramCount> top_ngrams(const Corpus& corpus, const Tokenizer& tokenizer, std::size_t n,
                                   std::size_t top_n);

struct DsirWeights {
    /// (doc id, natural-log importance weight) in corpus order.
    std::vector<std::pair<std::string, double>> per_doc_log_weight;

    double at(std::string_view doc_id) const;
};

/// Log weight of a document is the sum over its hashed n-grams of
/// ln p(b) - ln q(b), with add-one smoothed bucket models
/// p(b) = (target[b] + 1) / (target_total + B). Throws ConfigError when the
/// profiles disagree in layout or were built with another tokenizer.
DsirWeights dsir_weights(const Corpus& raw, const FeatureProfile& target_profile,
                         const FeatureProfile& raw_profile, const Tokenizer& tokenizer);

/// Gumbel-top-k: keeps the k documents with the largest
/// log_weight + Gumbel(seed, doc id). Result keeps corpus order.
Corpus dsir_select(const Corpus& raw, const DsirWeights& weights, std::size_t k, std::uint64_t seed);

struct CoverageMetrics {
    double reference_occupied = 0.0;
    double candidate_occupied = 0.0;
    /// Candidate 99th-percentile upper edge over the reference's.
    double range_ratio = 0.0;
    /// Sum over bins (overflow included) of min(p_i, q_i).
    double overlap = 0.0;
};

/// Throws ConfigError when the edges differ.
CoverageMetrics coverage_report(const Histogram& reference, const Histogram& candidate);

/// Upper edge of the bin holding the q-quantile; overflow maps to the last
/// edge.
double histogram_quantile_edge(const Histogram& h, double q);

/// Corpus of `n_docs` documents of `length` tokens drawn ancestrally from the
/// prior, origin synthetic.
Corpus sample_corpus(const PriorModel& prior, const Tokenizer& tokenizer, std::size_t n_docs, std::size_t length,
                     std::uint64_t seed, std::string_view id_prefix = "gen");

}  // namespace toedit
