#include "toedit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "toedit/error.hpp"
#include "toedit/parallel.hpp"
#include "toedit/random.hpp"

namespace toedit {

Histogram::Histogram(std::vector<double> e, bool closed) : edges(std::move(e)), last_closed(closed) {
    if (edges.size() < 2) throw ConfigError("a histogram needs at least two edges");
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ConfigError("histogram edges must be strictly increasing");
    counts.assign(edges.size() - 1, 0);
}

void Histogram::add(double value) {
    if (std::isnan(value) || value > edges.back() || (value == edges.back() && !last_closed)) {
        ++overflow;
        return;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), value);
    std::size_t bin = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    bin = std::min(bin, counts.size() - 1);
    ++counts[bin];
    ++total;
}

std::vector<double> default_ppl_edges() {
    std::vector<double> edges;
    for (int e = 0; e <= 100; e += 2) edges.push_back(e);
    return edges;
}

std::vector<double> unit_interval_edges(std::size_t bins) {
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(bins);
    return edges;
}

PplProfile ppl_profile(const Corpus& corpus, const Tokenizer& tokenizer, const PriorModel& prior,
                       std::vector<double> edges, std::size_t chunk, std::size_t jobs) {
    if (corpus.empty()) throw ConfigError("ppl profile needs a non-empty corpus");
    std::vector<std::vector<double>> per_doc(corpus.size());
    parallel_for(corpus.size(), jobs, [&](std::size_t d) {
        const auto tokens = tokenizer.encode(corpus[d].text);
        if (tokens.empty()) return;
        const std::span<const TokenId> all(tokens);
        const std::size_t step = chunk == 0 ? tokens.size() : chunk;
        for (std::size_t start = 0; start < tokens.size(); start += step) {
            auto window = all.subspan(start, std::min(step, tokens.size() - start));
            per_doc[d].push_back(score_sequence(prior, window).ppl);
        }
    });

    PplProfile profile;
    profile.histogram = Histogram(std::move(edges));
    for (auto& values : per_doc) {
        if (values.empty()) {
            ++profile.skipped_empty;
            continue;
        }
        for (double v : values) {
            profile.histogram.add(v);
            profile.values.push_back(v);
        }
    }
    return profile;
}

std::vector<double> TokenProbProfile::percentages() const {
    std::vector<double> out(histogram.counts.size(), 0.0);
    if (histogram.total == 0) return out;
    for (std::size_t b = 0; b < out.size(); ++b)
        out[b] = 100.0 * static_cast<double>(histogram.counts[b]) / static_cast<double>(histogram.total);
    return out;
}

TokenProbProfile token_prob_profile(const Corpus& corpus, const Tokenizer& tokenizer, const PriorModel& prior,
                                    std::size_t jobs) {
    std::vector<std::vector<double>> per_doc(corpus.size());
    parallel_for(corpus.size(), jobs, [&](std::size_t d) {
        const auto tokens = tokenizer.encode(corpus[d].text);
        if (!tokens.empty()) per_doc[d] = score_sequence(prior, tokens).per_token_prob;
    });
    TokenProbProfile profile;
    profile.histogram = Histogram(unit_interval_edges(10), true);
    for (const auto& probs : per_doc) {
        for (double p : probs) {
            profile.histogram.add(p);
            if (p >= 0.99) ++profile.high_confidence;
        }
    }
    return profile;
}

double histogram_entropy(const Histogram& h) {
    if (h.total == 0) throw ConfigError("entropy of an empty histogram is undefined");
    const double total = static_cast<double>(h.total);
    double entropy = 0.0;
    for (auto c : h.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        entropy -= p * std::log(p);
    }
    return entropy;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

// ---------------------------------------------------------------------------
// Hashed n-gram features

bool FeatureProfile::compatible_with(const FeatureProfile& other) const noexcept {
    const bool same_tokenizer =
        tokenizer_id.empty() || other.tokenizer_id.empty() || tokenizer_id == other.tokenizer_id;
    return buckets == other.buckets && n_orders == other.n_orders && hash_seed == other.hash_seed && same_tokenizer;
}

std::size_t ngram_bucket(std::span<const TokenId> ngram, std::uint64_t hash_seed, std::size_t buckets) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (TokenId t : ngram) {
        const char bytes[4] = {static_cast<char>(t & 0xff), static_cast<char>((t >> 8) & 0xff),
                               static_cast<char>((t >> 16) & 0xff), static_cast<char>((t >> 24) & 0xff)};
        h = fnv1a64(std::string_view(bytes, 4), h);
    }
    return static_cast<std::size_t>((h ^ hash_seed) % buckets);
}

namespace {

void validate_orders(const std::vector<std::size_t>& n_orders) {
    if (n_orders.empty()) throw ConfigError("at least one n-gram order is required");
    for (auto n : n_orders)
        if (n == 0) throw ConfigError("n-gram orders must be >= 1");
}

template <class Fn>
void for_each_bucket(std::span<const TokenId> tokens, const std::vector<std::size_t>& n_orders,
                     std::uint64_t hash_seed, std::size_t buckets, Fn&& fn) {
    for (std::size_t n : n_orders) {
        if (tokens.size() < n) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) fn(ngram_bucket(tokens.subspan(i, n), hash_seed, buckets));
    }
}

}  // namespace

FeatureProfile hash_ngram_features(const Corpus& corpus, const Tokenizer& tokenizer,
                                   const std::vector<std::size_t>& n_orders, std::size_t buckets,
                                   std::uint64_t hash_seed) {
    if (buckets == 0) throw ConfigError("bucket count must be >= 1");
    validate_orders(n_orders);
    FeatureProfile profile;
    profile.buckets = buckets;
    profile.n_orders = n_orders;
    profile.hash_seed = hash_seed;
    profile.tokenizer_id = tokenizer.id();
    profile.counts.assign(buckets, 0);
    for (const auto& doc : corpus) {
        const auto tokens = tokenizer.encode(doc.text);
        for_each_bucket(tokens, n_orders, hash_seed, buckets, [&](std::size_t b) {
            ++profile.counts[b];
            ++profile.total_ngrams;
        });
    }
    return profile;
}

void save_profile(const FeatureProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write profile " + path.string());
    out << "TOEDIT-FEATURES-v1 " << profile.buckets << ' ' << profile.hash_seed << ' ';
    for (std::size_t i = 0; i < profile.n_orders.size(); ++i) out << (i ? "," : "") << profile.n_orders[i];
    out << ' ' << profile.total_ngrams << ' ' << (profile.tokenizer_id.empty() ? "-" : profile.tokenizer_id) << '\n';
    for (auto c : profile.counts) out << c << '\n';
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

FeatureProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open profile " + path.string());
    std::string magic, orders;
    FeatureProfile profile;
    if (!(in >> magic) || magic != "TOEDIT-FEATURES-v1") throw FormatError("unrecognized profile file " + path.string());
    if (!(in >> profile.buckets >> profile.hash_seed >> orders >> profile.total_ngrams >> profile.tokenizer_id) ||
        profile.buckets == 0)
        throw FormatError("bad profile header in " + path.string());
    if (profile.tokenizer_id == "-") profile.tokenizer_id.clear();
    std::istringstream os(orders);
    for (std::string part; std::getline(os, part, ',');) profile.n_orders.push_back(std::stoul(part));
    profile.counts.resize(profile.buckets);
    std::uint64_t sum = 0;
    for (auto& c : profile.counts) {
        if (!(in >> c)) throw FormatError("truncated profile " + path.string());
        sum += c;
    }
    if (sum != profile.total_ngrams) throw FormatError("profile counts do not sum to total in " + path.string());
    return profile;
}

std::vector<NgramCount> top_ngrams(const Corpus& corpus, const Tokenizer& tokenizer, std::size_t n,
                                   std::size_t top_n) {
    if (n == 0) throw ConfigError("n must be >= 1");
    if (top_n == 0) throw ConfigError("top_n must be >= 1");
    std::map<std::vector<TokenId>, std::uint64_t> counts;
    for (const auto& doc : corpus) {
        const auto tokens = tokenizer.encode(doc.text);
        for (std::size_t i = 0; i + n <= tokens.size(); ++i)
            ++counts[std::vector<TokenId>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                          tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
    std::vector<NgramCount> out;
    out.reserve(counts.size());
    for (auto& [ngram, count] : counts) out.push_back({ngram, count});
    // Stable: the map already yields lexicographic order within equal counts.
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
    if (out.size() > top_n) out.resize(top_n);
    return out;
}

// ---------------------------------------------------------------------------
// DSIR

double DsirWeights::at(std::string_view doc_id) const {
    for (const auto& [id, w] : per_doc_log_weight)
        if (id == doc_id) return w;
    throw ConfigError("no DSIR weight for document '" + std::string(doc_id) + "'");
}

DsirWeights dsir_weights(const Corpus& raw, const FeatureProfile& target_profile, const FeatureProfile& raw_profile,
                         const Tokenizer& tokenizer) {
    if (!target_profile.compatible_with(raw_profile))
        throw ConfigError("target and raw feature profiles differ in buckets, n-gram orders, hash seed or tokenizer");
    for (const auto* p : {&target_profile, &raw_profile})
        if (!p->tokenizer_id.empty() && p->tokenizer_id != tokenizer.id())
            throw ConfigError("feature profile was built with tokenizer '" + p->tokenizer_id + "', not '" +
                              tokenizer.id() + "'");
    const std::size_t B = target_profile.buckets;
    if (target_profile.counts.size() != B || raw_profile.counts.size() != B)
        throw ConfigError("feature profile count vector does not match its bucket count");

    const double target_denominator = static_cast<double>(target_profile.total_ngrams) + static_cast<double>(B);
    const double raw_denominator = static_cast<double>(raw_profile.total_ngrams) + static_cast<double>(B);
    std::vector<double> log_ratio(B);
    for (std::size_t b = 0; b < B; ++b) {
        const double p = (static_cast<double>(target_profile.counts[b]) + 1.0) / target_denominator;
        const double q = (static_cast<double>(raw_profile.counts[b]) + 1.0) / raw_denominator;
        log_ratio[b] = std::log(p) - std::log(q);
    }

    DsirWeights weights;
    weights.per_doc_log_weight.reserve(raw.size());
    for (const auto& doc : raw) {
        const auto tokens = tokenizer.encode(doc.text);
        double w = 0.0;
        for_each_bucket(tokens, target_profile.n_orders, target_profile.hash_seed, B,
                        [&](std::size_t b) { w += log_ratio[b]; });
        weights.per_doc_log_weight.emplace_back(doc.id, w);
    }
    return weights;
}

Corpus dsir_select(const Corpus& raw, const DsirWeights& weights, std::size_t k, std::uint64_t seed) {
    if (k > raw.size())
        throw ConfigError("cannot select " + std::to_string(k) + " of " + std::to_string(raw.size()) + " documents");
    std::unordered_map<std::string_view, double> by_id;
    by_id.reserve(weights.per_doc_log_weight.size());
    for (const auto& [id, w] : weights.per_doc_log_weight) by_id.emplace(id, w);

    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto it = by_id.find(raw[i].id);
        if (it == by_id.end()) throw ConfigError("no DSIR weight for document '" + raw[i].id + "'");
        Rng rng = make_rng(seed, raw[i].id);
        keys.emplace_back(it->second + gumbel(rng), i);
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                      [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    for (std::size_t i = 0; i < k; ++i) chosen.push_back(keys[i].second);
    std::sort(chosen.begin(), chosen.end());

    std::vector<Document> docs;
    docs.reserve(k);
    for (std::size_t i : chosen) docs.push_back(raw[i]);
    return Corpus(std::move(docs), raw.provenance() + " [dsir k=" + std::to_string(k) + "]");
}

// ---------------------------------------------------------------------------
// Coverage

double histogram_quantile_edge(const Histogram& h, double q) {
    const std::size_t n = h.observations();
    if (n == 0) throw ConfigError("quantile of an empty histogram");
    const double target = q * static_cast<double>(n);
    std::size_t cumulative = 0;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        cumulative += h.counts[b];
        if (h.counts[b] > 0 && static_cast<double>(cumulative) >= target) return h.edges[b + 1];
    }
    return h.edges.back();
}

CoverageMetrics coverage_report(const Histogram& reference, const Histogram& candidate) {
    if (reference.edges != candidate.edges) throw ConfigError("coverage report needs histograms with identical edges");
    if (reference.observations() == 0 || candidate.observations() == 0)
        throw ConfigError("coverage report needs non-empty histograms");
    auto occupied = [](const Histogram& h) {
        const auto used = std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; });
        return static_cast<double>(used) / static_cast<double>(h.counts.size());
    };
    CoverageMetrics m;
    m.reference_occupied = occupied(reference);
    m.candidate_occupied = occupied(candidate);
    m.range_ratio = histogram_quantile_edge(candidate, 0.99) / histogram_quantile_edge(reference, 0.99);

    const double nr = static_cast<double>(reference.observations());
    const double nc = static_cast<double>(candidate.observations());
    for (std::size_t b = 0; b < reference.counts.size(); ++b)
        m.overlap += std::min(static_cast<double>(reference.counts[b]) / nr, static_cast<double>(candidate.counts[b]) / nc);
    m.overlap += std::min(static_cast<double>(reference.overflow) / nr, static_cast<double>(candidate.overflow) / nc);
    return m;
}

Corpus sample_corpus(const PriorModel& prior, const Tokenizer& tokenizer, std::size_t n_docs, std::size_t length,
                     std::uint64_t seed, std::string_view id_prefix) {
    std::vector<Document> docs;
    docs.reserve(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
        Rng rng = make_rng(seed, d);
        auto tokens = sample_sequence(prior, length, rng);
        docs.push_back(Document{std::string(id_prefix) + "-" + std::to_string(d), tokenizer.detokenize(tokens),
                                Origin::synthetic, {}});
    }
    return Corpus(std::move(docs), "sampled from prior");
}

}  // namespace toedit
