#include "toedit/editor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "toedit/error.hpp"
#include "toedit/parallel.hpp"

namespace toedit {

std::string_view to_string(SamplingStrategy s) noexcept {
    switch (s) {
        case SamplingStrategy::top_k: return "top_k";
        case SamplingStrategy::top_p: return "top_p";
        case SamplingStrategy::rejection: return "rejection";
    }
    return "top_k";
}

SamplingStrategy parse_strategy(std::string_view name) {
    if (name == "top_k") return SamplingStrategy::top_k;
    if (name == "top_p") return SamplingStrategy::top_p;
    if (name == "rejection") return SamplingStrategy::rejection;
    throw ConfigError("unknown sampling strategy '" + std::string(name) + "'");
}

std::vector<std::string> EditPolicy::violations() const {
    std::vector<std::string> out;
    if (!(p >= 0.0) || std::isnan(p)) out.emplace_back("p must be >= 0");
    if (k == 0) out.emplace_back("k must be >= 1");
    if (strategy == SamplingStrategy::top_p && !(nucleus > 0.0 && nucleus <= 1.0))
        out.emplace_back("nucleus must lie in (0, 1]");
    if (strategy == SamplingStrategy::rejection && max_rejects == 0) out.emplace_back("max_rejects must be >= 1");
    return out;
}

void EditPolicy::validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid edit policy:";
    for (const auto& s : v) msg += " " + s + ";";
    msg.pop_back();
    throw ConfigError(msg);
}

EditReport& EditReport::operator+=(const EditReport& other) noexcept {
    total_tokens += other.total_tokens;
    flagged += other.flagged;
    changed += other.changed;
    for (std::size_t b = 0; b < per_interval_hist.size(); ++b) per_interval_hist[b] += other.per_interval_hist[b];
    return *this;
}

std::size_t probability_bucket(double p) noexcept {
    if (!(p > 0.0)) return 0;
    return std::min<std::size_t>(static_cast<std::size_t>(p * 10.0), 9);
}

EditPlan plan_edits(const TokenSequence& seq, const PriorModel& prior, const EditPolicy& policy) {
    if (seq.empty()) throw ConfigError("cannot plan edits for empty document '" + seq.doc_id + "'");
    // One pass over the original tokens. Remote priors hand back candidate
    // lists in the same pass; local ones are queried per flagged position.
    const bool batched = prior.max_candidates() < prior.vocab_size();
    const std::size_t k = batched && policy.strategy == SamplingStrategy::top_k ? policy.k : 0;
    auto scores = prior.score_positions(seq.tokens, k);

    EditPlan plan;
    plan.doc_id = seq.doc_id;
    plan.length = seq.size();
    plan.token_probs.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = scores[i].prob;
        plan.token_probs.push_back(p);
        if (p >= policy.p) {
            plan.flagged_positions.push_back(i);
            plan.probs.push_back(p);
            if (k > 0) plan.candidates.push_back(std::move(scores[i].topk));
        }
    }
    return plan;
}

TokenId sample_from_candidates(std::span<const Candidate> candidates, TokenId original, bool exclude_original,
                               Rng& rng) {
    if (!exclude_original) {
        if (candidates.empty()) return original;
        return draw_candidate(candidates, rng);
    }
    std::vector<Candidate> kept;
    kept.reserve(candidates.size());
    for (const auto& c : candidates)
        if (c.token != original) kept.push_back(c);
    if (kept.empty()) return original;
    return draw_candidate(kept, rng);
}

namespace {

TokenId sample_top_p(const PriorModel& prior, std::span<const TokenId> context, TokenId original,
                     const EditPolicy& policy, Rng& rng) {
    auto dist = prior.next_token_dist(context, prior.max_candidates());
    double mass = 0.0;
    std::size_t keep = 0;
    while (keep < dist.candidates.size() && mass < policy.nucleus) mass += dist.candidates[keep++].prob;
    return sample_from_candidates(std::span(dist.candidates).first(keep), original, policy.exclude_original, rng);
}

TokenId sample_rejection(const PriorModel& prior, std::span<const TokenId> context, TokenId original,
                         const EditPolicy& policy, Rng& rng) {
    auto dist = prior.next_token_dist(context, prior.max_candidates());
    std::vector<Candidate> pool;
    pool.reserve(dist.candidates.size());
    for (const auto& c : dist.candidates)
        if (!(policy.exclude_original && c.token == original)) pool.push_back(c);
    if (!pool.empty()) {
        for (std::size_t attempt = 0; attempt < policy.max_rejects; ++attempt) {
            const TokenId draw = draw_candidate(pool, rng);
            auto it = std::find_if(pool.begin(), pool.end(), [&](const Candidate& c) { return c.token == draw; });
            if (it->prob < policy.p) return draw;
        }
    }
    auto fallback = prior.next_token_dist(context, policy.k);
    return sample_from_candidates(fallback.candidates, original, policy.exclude_original, rng);
}

}  // namespace

TokenId sample_replacement(const PriorModel& prior, std::span<const TokenId> context, TokenId original,
                           const EditPolicy& policy, Rng& rng) {
    switch (policy.strategy) {
        case SamplingStrategy::top_k: {
            auto dist = prior.next_token_dist(context, policy.k);
            return sample_from_candidates(dist.candidates, original, policy.exclude_original, rng);
        }
        case SamplingStrategy::top_p: return sample_top_p(prior, context, original, policy, rng);
        case SamplingStrategy::rejection: return sample_rejection(prior, context, original, policy, rng);
    }
    return original;
}

EditedSequence apply_edits(const TokenSequence& seq, const EditPlan& plan, const PriorModel& prior,
                           const EditPolicy& policy, Rng& rng) {
    if (plan.doc_id != seq.doc_id || plan.length != seq.size() || plan.token_probs.size() != seq.size() ||
        plan.probs.size() != plan.flagged_positions.size() ||
        (!plan.candidates.empty() && plan.candidates.size() != plan.flagged_positions.size()))
        throw ConfigError("edit plan does not match document '" + seq.doc_id + "'");
    for (std::size_t j = 0; j < plan.flagged_positions.size(); ++j) {
        const auto i = plan.flagged_positions[j];
        if (i >= seq.size() || (j > 0 && i <= plan.flagged_positions[j - 1]))
            throw ConfigError("edit plan for '" + seq.doc_id + "' has invalid position " + std::to_string(i));
    }

    EditedSequence out{seq, {}};
    out.report.total_tokens = seq.size();
    out.report.flagged = plan.flagged_positions.size();
    for (double p : plan.token_probs) ++out.report.per_interval_hist[probability_bucket(p)];

    const std::span<const TokenId> original(seq.tokens);
    for (std::size_t j = 0; j < plan.flagged_positions.size(); ++j) {
        const auto i = plan.flagged_positions[j];
        // Contexts always come from the original sequence.
        const TokenId replacement =
            plan.candidates.empty()
                ? sample_replacement(prior, original.first(i), original[i], policy, rng)
                : sample_from_candidates(plan.candidates[j], original[i], policy.exclude_original, rng);
        out.sequence.tokens[i] = replacement;
        if (replacement != original[i]) ++out.report.changed;
    }
    return out;
}

namespace {

std::string format_fraction(double f) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << f;
    return os.str();
}

}  // namespace

CorpusEditResult edit_corpus(const Corpus& corpus, const Tokenizer& tokenizer, const PriorModel& prior,
                             const EditPolicy& policy, std::size_t jobs, std::string_view stream_key) {
    policy.validate();
    const auto prior_tok = prior.tokenizer_id();
    if (!prior_tok.empty() && prior_tok != tokenizer.id())
        throw ConfigError("prior expects tokenizer '" + prior_tok + "' but corpus uses '" + tokenizer.id() + "'");
    if (prior.vocab_size() < tokenizer.vocab_size())
        throw ConfigError("prior vocabulary (" + std::to_string(prior.vocab_size()) +
                          ") is smaller than the tokenizer's (" + std::to_string(tokenizer.vocab_size()) + ")");

    const std::size_t n = corpus.size();
    std::vector<Document> docs(corpus.begin(), corpus.end());
    std::vector<DocumentReport> reports(n);
    std::vector<std::exception_ptr> failures(n);

    parallel_for(n, jobs, [&](std::size_t d) {
        const Document& doc = corpus[d];
        reports[d].doc_id = doc.id;
        try {
            auto seq = tokenizer.tokenize(doc);
            if (seq.empty()) return;
            std::string key(stream_key);
            key += '\x1f';
            key += doc.id;
            Rng rng = make_rng(policy.seed, key);
            auto plan = plan_edits(seq, prior, policy);
            auto edited = apply_edits(seq, plan, prior, policy, rng);
            reports[d].report = edited.report;
            if (edited.report.flagged == 0) return;
            Document& out = docs[d];
            if (edited.report.changed > 0) out.text = tokenizer.detokenize(edited.sequence.tokens);
            out.origin = Origin::edited;
            out.meta["edited_fraction"] = format_fraction(edited.report.edited_fraction());
        } catch (...) {
            failures[d] = std::current_exception();
            reports[d].report = {};
        }
    });

    CorpusEditResult result;
    for (std::size_t d = 0; d < n; ++d) {
        if (failures[d]) {
            std::string message = "unknown error";
            try {
                std::rethrow_exception(failures[d]);
            } catch (const std::exception& e) {
                message = e.what();
            } catch (...) {
            }
            result.errors.push_back({corpus[d].id, std::move(message), failures[d]});
        }
        result.aggregate += reports[d].report;
    }
    result.documents = std::move(reports);
    result.corpus = Corpus(std::move(docs), corpus.provenance() + " [edited]");
    return result;
}

std::vector<CorpusEditResult> run_generations(const Corpus& corpus, const Tokenizer& tokenizer,
                                              const PriorModel& prior, const EditPolicy& policy,
                                              std::size_t generations, std::size_t jobs) {
    if (generations == 0) throw ConfigError("generations must be >= 1");
    std::vector<CorpusEditResult> out;
    out.reserve(generations);
    const Corpus* input = &corpus;
    for (std::size_t g = 1; g <= generations; ++g) {
        const std::string key = g == 1 ? std::string{} : "generation/" + std::to_string(g);
        out.push_back(edit_corpus(*input, tokenizer, prior, policy, jobs, key));
        input = &out.back().corpus;
    }
    return out;
}

}  // namespace toedit
