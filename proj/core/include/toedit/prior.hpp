#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "toedit/corpus.hpp"
#include "toedit/random.hpp"

namespace toedit {

struct Candidate {
    TokenId token = 0;
    double prob = 0.0;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Up to k candidates, probability descending, ties by ascending token id.
struct TopKDistribution {
    std::vector<Candidate> candidates;
    double mass = 0.0;
};

/// Probability of the observed token at one position plus the leading
/// candidates of the distribution at that position.
struct PositionScore {
    double prob = 0.0;
    std::vector<Candidate> topk;
};

struct SequenceScore {
    std::vector<double> per_token_prob;
    double log_likelihood = 0.0;
    double ppl = 0.0;
};

/// Conditional next-token distribution P(. | context).
///
/// Implementations are immutable after construction (remote handles guard
/// their cache internally) so one instance can serve concurrent scorers.
class PriorModel {
public:
    virtual ~PriorModel() = default;

    virtual std::size_t vocab_size() const = 0;
    /// Empty when the prior accepts any tokenizer.
    virtual std::string tokenizer_id() const = 0;

    virtual TopKDistribution next_token_dist(std::span<const TokenId> context, std::size_t k) const = 0;
    virtual double token_prob(std::span<const TokenId> context, TokenId token) const = 0;

    /// Scores every position of `tokens` against its original prefix. With
    /// k == 0 the topk lists are left empty.
    virtual std::vector<PositionScore> score_positions(std::span<const TokenId> tokens, std::size_t k) const;

    /// Largest k for which next_token_dist returns the complete ranking it
    /// can offer.
    virtual std::size_t max_candidates() const { return vocab_size(); }
};

/// P(t | ctx) = 1 / V for every context.
class UniformPrior final : public PriorModel {
public:
    explicit UniformPrior(std::size_t vocab_size, std::string tokenizer_id = {});

    std::size_t vocab_size() const override { return vocab_size_; }
    std::string tokenizer_id() const override { return tokenizer_id_; }
    TopKDistribution next_token_dist(std::span<const TokenId> context, std::size_t k) const override;
    double token_prob(std::span<const TokenId> context, TokenId token) const override;

private:
    std::size_t vocab_size_;
    std::string tokenizer_id_;
};

/// Interpolated absolute-discounting n-gram model.
///
/// Level -1 is the add-one unigram (c(t)+1)/(N+V). Every longer context
/// length L = 0..order-1 interpolates onto the level below:
///
///   P_L(t|ctx) = max(c(ctx,t) - D, 0)/c(ctx) + D*N1+(ctx)/c(ctx) * P_{L-1}(t|ctx')
///
/// where ctx' drops the oldest token. A context never seen passes the lower
/// level through unchanged. Contexts are taken within a document only, so
/// position i is scored with min(i, order-1) preceding tokens.
class NgramPrior final : public PriorModel {
public:
    struct ContextStats {
        std::uint64_t total = 0;
        /// (token, count) sorted by token id.
        std::vector<std::pair<TokenId, std::uint64_t>> continuations;
    };

    struct ContextHash {
        std::size_t operator()(const std::vector<TokenId>& ctx) const noexcept;
    };
    using LevelTable = std::unordered_map<std::vector<TokenId>, ContextStats, ContextHash>;

    NgramPrior(Tokenizer tokenizer, std::size_t order, double discount,
               std::vector<std::uint64_t> unigram_counts, std::vector<LevelTable> levels);

    std::size_t vocab_size() const override { return unigram_.size(); }
    std::string tokenizer_id() const override { return tokenizer_.id(); }
    TopKDistribution next_token_dist(std::span<const TokenId> context, std::size_t k) const override;
    double token_prob(std::span<const TokenId> context, TokenId token) const override;

    /// Probabilities for every vocabulary entry under `context`.
    std::vector<double> distribution(std::span<const TokenId> context) const;

    std::size_t order() const noexcept { return order_; }
    double discount() const noexcept { return discount_; }
    const Tokenizer& tokenizer() const noexcept { return tokenizer_; }
    const std::vector<std::uint64_t>& unigram_counts() const noexcept { return unigram_; }
    /// levels()[L-1] holds contexts of length L (1 <= L < order).
    const std::vector<LevelTable>& levels() const noexcept { return levels_; }
    std::uint64_t total_tokens() const noexcept { return total_; }

private:
    // Contexts found for each suffix length of `context`, shortest first.
    std::vector<const ContextStats*> matched_contexts(std::span<const TokenId> context) const;
    double level0(TokenId token) const;
    double prob_given(const std::vector<const ContextStats*>& matched, TokenId token) const;

    Tokenizer tokenizer_;
    std::size_t order_;
    double discount_;
    std::vector<std::uint64_t> unigram_;
    std::vector<LevelTable> levels_;
    std::uint64_t total_ = 0;
    std::size_t unigram_types_ = 0;
    // Token ids by unigram count descending, id ascending. Level-0
    // probability is monotone in the count, so this is also the ranking of
    // every token with no higher-order evidence.
    std::vector<TokenId> unigram_rank_;
};

/// Throws ConfigError for order 0, a discount outside (0,1) or a corpus that
/// tokenizes to nothing.
NgramPrior train_ngram_prior(const Corpus& corpus, const Tokenizer& tokenizer, std::size_t order = 3,
                             double discount = 0.75);

/// Container: the line "TOEDIT-NGRAM-v1" followed by a JSON body.
void save_prior(const NgramPrior& prior, const std::filesystem::path& path);
NgramPrior load_prior(const std::filesystem::path& path);

inline constexpr std::string_view kPriorMagic = "TOEDIT-NGRAM-v1";

/// Throws ConfigError on an empty sequence.
SequenceScore score_sequence(const PriorModel& prior, const TokenSequence& seq);
SequenceScore score_sequence(const PriorModel& prior, std::span<const TokenId> tokens);

/// Draws one candidate with probability proportional to its prob; the
/// weights need not sum to one. `candidates` must be non-empty.
TokenId draw_candidate(std::span<const Candidate> candidates, Rng& rng);

/// Ancestral sampling of `length` tokens from the full distribution.
std::vector<TokenId> sample_sequence(const PriorModel& prior, std::size_t length, Rng& rng);

// ---------------------------------------------------------------------------
// Remote prior over the HTTP scoring protocol:
//   GET  /v1/meta  -> {tokenizer_id, vocab_size, model_identifier}
//   POST /v1/score <- {tokens: [...], k}
//                  -> {per_position: [{prob, topk: [{token, prob}, ...]}, ...]}

struct RemotePriorHandle {
    std::string endpoint;
    std::size_t k_default = 8;
    std::chrono::milliseconds timeout{10000};
    /// When set, the provider's advertised tokenizer must match.
    std::string tokenizer_id;
};

/// Validates one /v1/score response against the wire rules. Throws
/// ConformanceError naming the rule: PER_POSITION_LENGTH, PROB_POSITIVE,
/// TOPK_LENGTH, TOPK_RANGE, TOPK_SORTED, TOPK_MASS, MALFORMED.
std::vector<PositionScore> parse_score_response(const std::string& body, std::size_t expected_positions,
                                                std::size_t k, std::size_t vocab_size);

class RemotePrior final : public PriorModel {
public:
    explicit RemotePrior(RemotePriorHandle handle);
    ~RemotePrior() override;

    std::size_t vocab_size() const override;
    std::string tokenizer_id() const override;
    TopKDistribution next_token_dist(std::span<const TokenId> context, std::size_t k) const override;
    double token_prob(std::span<const TokenId> context, TokenId token) const override;
    std::vector<PositionScore> score_positions(std::span<const TokenId> tokens, std::size_t k) const override;
    std::size_t max_candidates() const override { return handle_.k_default; }

    const RemotePriorHandle& handle() const noexcept { return handle_; }

private:
    struct Meta {
        std::size_t vocab_size = 0;
        std::string tokenizer_id;
    };
    const Meta& meta() const;
    std::vector<PositionScore> request(std::span<const TokenId> tokens, std::size_t k) const;

    RemotePriorHandle handle_;
    std::string host_;
    std::string base_path_;
    mutable std::mutex mutex_;
    mutable std::optional<Meta> meta_;
    // Last scored sequence; single-pass editing reads every position's
    // candidates from it.
    mutable std::vector<TokenId> cached_tokens_;
    mutable std::vector<PositionScore> cached_scores_;
    mutable std::size_t cached_k_ = 0;
};

/// Lazily connects; nothing is sent until the first query.
std::unique_ptr<RemotePrior> open_remote_prior(const std::string& endpoint, std::size_t k_default = 8,
                                               std::chrono::milliseconds timeout = std::chrono::milliseconds{10000},
                                               std::string tokenizer_id = {});

}  // namespace toedit
