#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "toedit/corpus.hpp"
#include "toedit/prior.hpp"
#include "toedit/random.hpp"

namespace toedit {

enum class SamplingStrategy { top_k, top_p, rejection };

std::string_view to_string(SamplingStrategy s) noexcept;
SamplingStrategy parse_strategy(std::string_view name);

struct EditPolicy {
    /// Positions whose original-token probability is >= p get resampled.
    /// Anything above 1 disables editing.
    double p = 0.99;
    SamplingStrategy strategy = SamplingStrategy::top_k;
    std::size_t k = 8;
    double nucleus = 0.99;
    std::size_t max_rejects = 16;
    bool exclude_original = false;
    std::uint64_t seed = 0;

    /// Every violated constraint, empty when valid.
    std::vector<std::string> violations() const;
    /// Throws ConfigError listing all violations.
    void validate() const;
};

struct EditPlan {
    std::string doc_id;
    std::size_t length = 0;
    /// Strictly increasing indices i with P(x_i | x_<i) >= p.
    std::vector<std::size_t> flagged_positions;
    /// Probability at each flagged position.
    std::vector<double> probs;
    /// Original-token probability at every position.
    std::vector<double> token_probs;
    /// Candidate lists from the planning pass, aligned to flagged_positions;
    /// empty when the prior should be queried per position.
    std::vector<std::vector<Candidate>> candidates;
};

struct EditReport {
    std::size_t total_tokens = 0;
    std::size_t flagged = 0;
    std::size_t changed = 0;
    /// Ten buckets over [0, 1) of original-token probabilities; 1.0 lands in
    /// the last bucket.
    std::array<std::size_t, 10> per_interval_hist{};

    double edited_fraction() const noexcept {
        return total_tokens == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(total_tokens);
    }
    EditReport& operator+=(const EditReport& other) noexcept;
};

std::size_t probability_bucket(double p) noexcept;

/// Single scoring pass over the original sequence. Throws ConfigError on an
/// empty sequence.
EditPlan plan_edits(const TokenSequence& seq, const PriorModel& prior, const EditPolicy& policy);

/// Draws the replacement for one flagged position. `context` is the original
/// prefix.
TokenId sample_replacement(const PriorModel& prior, std::span<const TokenId> context, TokenId original,
                           const EditPolicy& policy, Rng& rng);

/// Same, drawing from a precomputed top-k candidate list (top_k strategy).
TokenId sample_from_candidates(std::span<const Candidate> candidates, TokenId original, bool exclude_original,
                               Rng& rng);

struct EditedSequence {
    TokenSequence sequence;
    EditReport report;
};

/// Throws ConfigError if the plan does not belong to `seq`.
EditedSequence apply_edits(const TokenSequence& seq, const EditPlan& plan, const PriorModel& prior,
                           const EditPolicy& policy, Rng& rng);

struct DocumentReport {
    std::string doc_id;
    EditReport report;
};

struct DocumentError {
    std::string doc_id;
    std::string message;
    std::exception_ptr error;
};

struct CorpusEditResult {
    Corpus corpus;
    EditReport aggregate;
    std::vector<DocumentReport> documents;
    std::vector<DocumentError> errors;
};

/// Edits every document independently; the random stream of a document is
/// derived from (policy.seed, stream_key, doc id). A failing document is left
/// unchanged and recorded in `errors`.
CorpusEditResult edit_corpus(const Corpus& corpus, const Tokenizer& tokenizer, const PriorModel& prior,
                             const EditPolicy& policy, std::size_t jobs = 1, std::string_view stream_key = {});

/// Generation g edits the output of generation g-1. Generation 1 matches
/// edit_corpus exactly.
std::vector<CorpusEditResult> run_generations(const Corpus& corpus, const Tokenizer& tokenizer,
                                              const PriorModel& prior, const EditPolicy& policy,
                                              std::size_t generations, std::size_t jobs = 1);

}  // namespace toedit
