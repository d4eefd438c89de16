#include "toedit/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "toedit/error.hpp"

namespace toedit {

using json = nlohmann::json;

namespace {

bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.token < b.token;
}

TopKDistribution finish(std::vector<Candidate> candidates, std::size_t k) {
    std::sort(candidates.begin(), candidates.end(), ranks_before);
    if (candidates.size() > k) candidates.resize(k);
    TopKDistribution out;
    out.mass = std::accumulate(candidates.begin(), candidates.end(), 0.0,
                               [](double acc, const Candidate& c) { return acc + c.prob; });
    out.candidates = std::move(candidates);
    return out;
}

void check_token(TokenId token, std::size_t vocab_size) {
    if (token >= vocab_size)
        throw ConfigError("token id " + std::to_string(token) + " outside vocabulary of size " +
                          std::to_string(vocab_size));
}

}  // namespace

std::vector<PositionScore> PriorModel::score_positions(std::span<const TokenId> tokens, std::size_t k) const {
    std::vector<PositionScore> out(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto context = tokens.first(i);
        out[i].prob = token_prob(context, tokens[i]);
        if (k > 0) out[i].topk = next_token_dist(context, k).candidates;
    }
    return out;
}

// ---------------------------------------------------------------------------
// UniformPrior

UniformPrior::UniformPrior(std::size_t vocab_size, std::string tokenizer_id)
    : vocab_size_(vocab_size), tokenizer_id_(std::move(tokenizer_id)) {
    if (vocab_size_ == 0) throw ConfigError("uniform prior needs a non-empty vocabulary");
}

TopKDistribution UniformPrior::next_token_dist(std::span<const TokenId>, std::size_t k) const {
    const double p = 1.0 / static_cast<double>(vocab_size_);
    std::vector<Candidate> candidates;
    const std::size_t n = std::min(k, vocab_size_);
    candidates.reserve(n);
    for (std::size_t t = 0; t < n; ++t) candidates.push_back({static_cast<TokenId>(t), p});
    return finish(std::move(candidates), k);
}

double UniformPrior::token_prob(std::span<const TokenId>, TokenId token) const {
    check_token(token, vocab_size_);
    return 1.0 / static_cast<double>(vocab_size_);
}

// ---------------------------------------------------------------------------
// NgramPrior

std::size_t NgramPrior::ContextHash::operator()(const std::vector<TokenId>& ctx) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (TokenId t : ctx) h = splitmix64(h ^ t);
    return static_cast<std::size_t>(h);
}

NgramPrior::NgramPrior(Tokenizer tokenizer, std::size_t order, double discount,
                       std::vector<std::uint64_t> unigram_counts, std::vector<LevelTable> levels)
    : tokenizer_(std::move(tokenizer)),
      order_(order),
      discount_(discount),
      unigram_(std::move(unigram_counts)),
      levels_(std::move(levels)) {
    if (order_ == 0) throw ConfigError("n-gram order must be at least 1");
    if (!(discount_ > 0.0 && discount_ < 1.0)) throw ConfigError("discount must lie in (0, 1)");
    if (unigram_.size() != tokenizer_.vocab_size())
        throw FormatError("unigram table size " + std::to_string(unigram_.size()) +
                          " does not match vocabulary size " + std::to_string(tokenizer_.vocab_size()));
    if (levels_.size() != order_ - 1)
        throw FormatError("expected " + std::to_string(order_ - 1) + " context levels, got " +
                          std::to_string(levels_.size()));
    for (auto c : unigram_) {
        total_ += c;
        if (c > 0) ++unigram_types_;
    }
    if (total_ == 0) throw ConfigError("n-gram prior needs at least one training token");

    unigram_rank_.resize(unigram_.size());
    std::iota(unigram_rank_.begin(), unigram_rank_.end(), TokenId{0});
    std::stable_sort(unigram_rank_.begin(), unigram_rank_.end(),
                     [&](TokenId a, TokenId b) { return unigram_[a] > unigram_[b]; });
}

std::vector<const NgramPrior::ContextStats*> NgramPrior::matched_contexts(std::span<const TokenId> context) const {
    std::vector<const ContextStats*> matched;
    const std::size_t longest = std::min(context.size(), order_ - 1);
    std::vector<TokenId> key;
    key.reserve(longest);
    for (std::size_t len = 1; len <= longest; ++len) {
        auto suffix = context.last(len);
        key.assign(suffix.begin(), suffix.end());
        auto it = levels_[len - 1].find(key);
        // A longer context ending in an unseen suffix is unseen as well.
        if (it == levels_[len - 1].end()) break;
        matched.push_back(&it->second);
    }
    return matched;
}

double NgramPrior::level0(TokenId token) const {
    const double n = static_cast<double>(total_);
    const double v = static_cast<double>(unigram_.size());
    const double c = static_cast<double>(unigram_[token]);
    const double base = (c + 1.0) / (n + v);
    const double term = c > discount_ ? (c - discount_) / n : 0.0;
    const double lambda = discount_ * static_cast<double>(unigram_types_) / n;
    return term + lambda * base;
}

double NgramPrior::prob_given(const std::vector<const ContextStats*>& matched, TokenId token) const {
    double p = level0(token);
    for (const ContextStats* stats : matched) {
        const double total = static_cast<double>(stats->total);
        auto it = std::lower_bound(stats->continuations.begin(), stats->continuations.end(), token,
                                   [](const auto& entry, TokenId t) { return entry.first < t; });
        double term = 0.0;
        if (it != stats->continuations.end() && it->first == token) {
            const double c = static_cast<double>(it->second);
            if (c > discount_) term = (c - discount_) / total;
        }
        const double lambda = discount_ * static_cast<double>(stats->continuations.size()) / total;
        p = term + lambda * p;
    }
    return p;
}

double NgramPrior::token_prob(std::span<const TokenId> context, TokenId token) const {
    check_token(token, unigram_.size());
    return prob_given(matched_contexts(context), token);
}

std::vector<double> NgramPrior::distribution(std::span<const TokenId> context) const {
    std::vector<double> p(unigram_.size());
    for (std::size_t t = 0; t < p.size(); ++t) p[t] = level0(static_cast<TokenId>(t));
    for (const ContextStats* stats : matched_contexts(context)) {
        const double total = static_cast<double>(stats->total);
        const double lambda = discount_ * static_cast<double>(stats->continuations.size()) / total;
        // Same operation order as prob_given so both paths agree bit for bit.
        for (double& x : p) x = lambda * x;
        for (const auto& [token, count] : stats->continuations) {
            const double c = static_cast<double>(count);
            const double term = c > discount_ ? (c - discount_) / total : 0.0;
            p[token] = term + p[token];
        }
    }
    return p;
}

TopKDistribution NgramPrior::next_token_dist(std::span<const TokenId> context, std::size_t k) const {
    const std::size_t v = unigram_.size();
    if (k == 0) return {};
    if (k >= v) {
        auto p = distribution(context);
        std::vector<Candidate> all(v);
        for (std::size_t t = 0; t < v; ++t) all[t] = {static_cast<TokenId>(t), p[t]};
        return finish(std::move(all), k);
    }

    const auto matched = matched_contexts(context);
    std::unordered_set<TokenId> seen;
    std::vector<Candidate> candidates;
    for (const ContextStats* stats : matched) {
        for (const auto& entry : stats->continuations) {
            if (seen.insert(entry.first).second) candidates.push_back({entry.first, prob_given(matched, entry.first)});
        }
    }
    // Tokens without higher-order evidence keep the unigram ranking.
    std::size_t added = 0;
    for (TokenId t : unigram_rank_) {
        if (added == k) break;
        if (seen.contains(t)) continue;
        candidates.push_back({t, prob_given(matched, t)});
        ++added;
    }
    return finish(std::move(candidates), k);
}

NgramPrior train_ngram_prior(const Corpus& corpus, const Tokenizer& tokenizer, std::size_t order, double discount) {
    if (order == 0) throw ConfigError("n-gram order must be at least 1");
    if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must lie in (0, 1)");

    std::vector<std::uint64_t> unigram(tokenizer.vocab_size(), 0);
    using Scratch = std::unordered_map<std::vector<TokenId>, std::map<TokenId, std::uint64_t>,
                                       NgramPrior::ContextHash>;
    std::vector<Scratch> scratch(order - 1);
    std::vector<TokenId> key;
    for (const auto& doc : corpus) {
        const auto tokens = tokenizer.encode(doc.text);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            ++unigram[tokens[i]];
            for (std::size_t len = 1; len < order && len <= i; ++len) {
                key.assign(tokens.begin() + static_cast<std::ptrdiff_t>(i - len),
                           tokens.begin() + static_cast<std::ptrdiff_t>(i));
                ++scratch[len - 1][key][tokens[i]];
            }
        }
    }
    if (std::all_of(unigram.begin(), unigram.end(), [](auto c) { return c == 0; }))
        throw ConfigError("cannot train a prior on an empty corpus");

    std::vector<NgramPrior::LevelTable> levels(order - 1);
    for (std::size_t l = 0; l + 1 < order; ++l) {
        levels[l].reserve(scratch[l].size());
        for (auto& [ctx, next] : scratch[l]) {
            NgramPrior::ContextStats stats;
            stats.continuations.assign(next.begin(), next.end());
            for (const auto& entry : next) stats.total += entry.second;
            levels[l].emplace(ctx, std::move(stats));
        }
        Scratch{}.swap(scratch[l]);
    }
    return NgramPrior(tokenizer, order, discount, std::move(unigram), std::move(levels));
}

// ---------------------------------------------------------------------------
// Container

namespace {

json tokenizer_to_json(const Tokenizer& tok) {
    json j;
    j["kind"] = to_string(tok.kind());
    j["tokens"] = tok.kind() == TokenizerKind::byte ? json::array() : json(tok.tokens());
    j["unk_id"] = tok.unk_id() ? json(*tok.unk_id()) : json(nullptr);
    j["id"] = tok.id();
    return j;
}

Tokenizer tokenizer_from_json(const json& j) {
    const auto kind = parse_tokenizer_kind(j.at("kind").get<std::string>());
    std::optional<TokenId> unk;
    if (!j.at("unk_id").is_null()) unk = j.at("unk_id").get<TokenId>();
    auto tokens = j.at("tokens").get<std::vector<std::string>>();
    switch (kind) {
        case TokenizerKind::byte: return Tokenizer::byte();
        case TokenizerKind::whitespace: return Tokenizer::whitespace(std::move(tokens), unk);
        case TokenizerKind::vocab_file:
            if (!unk) throw FormatError("vocab_file tokenizer without unk id");
            return Tokenizer::from_vocab(std::move(tokens), *unk);
    }
    throw FormatError("unknown tokenizer kind");
}

}  // namespace

void save_prior(const NgramPrior& prior, const std::filesystem::path& path) {
    json body;
    body["order"] = prior.order();
    body["discount"] = prior.discount();
    body["vocab_size"] = prior.vocab_size();
    body["tokenizer"] = tokenizer_to_json(prior.tokenizer());
    body["unigram"] = prior.unigram_counts();

    json levels = json::array();
    for (const auto& table : prior.levels()) {
        // Sorted so identical priors serialize to identical bytes.
        std::vector<const std::pair<const std::vector<TokenId>, NgramPrior::ContextStats>*> entries;
        entries.reserve(table.size());
        for (const auto& entry : table) entries.push_back(&entry);
        std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });
        json level = json::array();
        for (const auto* entry : entries) {
            json next = json::array();
            for (const auto& [token, count] : entry->second.continuations) next.push_back({token, count});
            level.push_back({{"ctx", entry->first}, {"next", std::move(next)}});
        }
        levels.push_back(std::move(level));
    }
    body["levels"] = std::move(levels);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write prior " + path.string());
    out << kPriorMagic << '\n' << body.dump() << '\n';
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

NgramPrior load_prior(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open prior " + path.string());
    std::string header;
    std::getline(in, header);
    if (header != kPriorMagic) {
        constexpr std::string_view family = "TOEDIT-NGRAM-v";
        if (header.starts_with(family))
            throw FormatError("unsupported prior version '" + header.substr(family.size()) + "' in " + path.string() +
                              " (expected " + std::string(kPriorMagic) + ")");
        throw FormatError("unrecognized prior file " + path.string());
    }
    try {
        json body = json::parse(in);
        auto tokenizer = tokenizer_from_json(body.at("tokenizer"));
        if (body.at("tokenizer").contains("id") && body["tokenizer"]["id"].get<std::string>() != tokenizer.id())
            throw FormatError("tokenizer fingerprint mismatch");
        const auto order = body.at("order").get<std::size_t>();
        const auto discount = body.at("discount").get<double>();
        auto unigram = body.at("unigram").get<std::vector<std::uint64_t>>();
        if (body.at("vocab_size").get<std::size_t>() != unigram.size()) throw FormatError("vocab size mismatch");

        std::vector<NgramPrior::LevelTable> levels;
        for (const auto& level : body.at("levels")) {
            NgramPrior::LevelTable table;
            table.reserve(level.size());
            for (const auto& entry : level) {
                NgramPrior::ContextStats stats;
                for (const auto& pair : entry.at("next")) {
                    auto token = pair.at(0).get<TokenId>();
                    auto count = pair.at(1).get<std::uint64_t>();
                    if (token >= unigram.size()) throw FormatError("continuation token out of range");
                    stats.continuations.emplace_back(token, count);
                    stats.total += count;
                }
                table.emplace(entry.at("ctx").get<std::vector<TokenId>>(), std::move(stats));
            }
            levels.push_back(std::move(table));
        }
        return NgramPrior(std::move(tokenizer), order, discount, std::move(unigram), std::move(levels));
    } catch (const json::exception& e) {
        throw FormatError("corrupt prior body in " + path.string() + ": " + e.what());
    } catch (const ConfigError& e) {
        throw FormatError("invalid prior in " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Scoring

SequenceScore score_sequence(const PriorModel& prior, std::span<const TokenId> tokens) {
    if (tokens.empty()) throw ConfigError("cannot score an empty sequence");
    SequenceScore score;
    auto positions = prior.score_positions(tokens, 0);
    score.per_token_prob.reserve(positions.size());
    for (const auto& pos : positions) {
        score.per_token_prob.push_back(pos.prob);
        score.log_likelihood += std::log(pos.prob);
    }
    score.ppl = std::exp(-score.log_likelihood / static_cast<double>(tokens.size()));
    return score;
}

SequenceScore score_sequence(const PriorModel& prior, const TokenSequence& seq) {
    return score_sequence(prior, std::span<const TokenId>(seq.tokens));
}

TokenId draw_candidate(std::span<const Candidate> candidates, Rng& rng) {
    if (candidates.empty()) throw ConfigError("cannot draw from an empty candidate list");
    double total = 0.0;
    for (const auto& c : candidates) total += c.prob;
    double u = uniform01(rng) * total;
    for (const auto& c : candidates) {
        if (u < c.prob) return c.token;
        u -= c.prob;
    }
    // Rounding left u at or past the last weight.
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it)
        if (it->prob > 0.0) return it->token;
    return candidates.back().token;
}

std::vector<TokenId> sample_sequence(const PriorModel& prior, std::size_t length, Rng& rng) {
    std::vector<TokenId> tokens;
    tokens.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        auto dist = prior.next_token_dist(tokens, prior.max_candidates());
        TokenId chosen = draw_candidate(dist.candidates, rng);
        tokens.push_back(chosen);
    }
    return tokens;
}

}  // namespace toedit
