#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "toedit/error.hpp"
#include "toedit/prior.hpp"

namespace toedit {

using json = nlohmann::json;

namespace {

constexpr double kMassTolerance = 1e-6;

// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos || endpoint.compare(0, scheme, "http") != 0)
        throw ConfigError("remote prior endpoint must be an http:// URL, got '" + endpoint + "'");
    const auto host_start = scheme + 3;
    if (host_start >= endpoint.size()) throw ConfigError("remote prior endpoint has no host: '" + endpoint + "'");
    const auto slash = endpoint.find('/', host_start);
    std::string host = endpoint.substr(0, slash);
    std::string path = slash == std::string::npos ? "" : endpoint.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {host, path};
}

ConformanceError violation(const char* rule, const std::string& detail) { return ConformanceError(rule, detail); }

void check_probability(double p, const std::string& where) {
    if (!(p > 0.0)) throw violation("PROB_POSITIVE", where + " has probability " + std::to_string(p));
    if (p > 1.0) throw violation("PROB_RANGE", where + " has probability " + std::to_string(p));
}

}  // namespace

std::vector<PositionScore> parse_score_response(const std::string& body, std::size_t expected_positions,
                                                std::size_t k, std::size_t vocab_size) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw violation("MALFORMED", std::string("response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("per_position") || !doc["per_position"].is_array())
        throw violation("MALFORMED", "response lacks a per_position array");
    const auto& rows = doc["per_position"];
    if (rows.size() != expected_positions)
        throw violation("PER_POSITION_LENGTH", "expected " + std::to_string(expected_positions) + " entries, got " +
                                                   std::to_string(rows.size()));

    std::vector<PositionScore> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = "position " + std::to_string(i);
        if (!row.is_object() || !row.contains("prob") || !row["prob"].is_number())
            throw violation("MALFORMED", where + " lacks a numeric prob");
        out[i].prob = row["prob"].get<double>();
        check_probability(out[i].prob, where);

        if (!row.contains("topk")) continue;
        const auto& topk = row["topk"];
        if (!topk.is_array()) throw violation("MALFORMED", where + " topk is not an array");
        if (topk.size() > k)
            throw violation("TOPK_LENGTH", where + " returned " + std::to_string(topk.size()) +
                                               " candidates for k=" + std::to_string(k));
        double mass = 0.0;
        for (std::size_t j = 0; j < topk.size(); ++j) {
            const auto& c = topk[j];
            if (!c.is_object() || !c.contains("token") || !c.contains("prob") || !c["token"].is_number_unsigned() ||
                !c["prob"].is_number())
                throw violation("MALFORMED", where + " candidate " + std::to_string(j) + " is malformed");
            Candidate cand{c["token"].get<TokenId>(), c["prob"].get<double>()};
            if (cand.token >= vocab_size)
                throw violation("TOPK_RANGE", where + " candidate token " + std::to_string(cand.token) +
                                                  " outside vocabulary of size " + std::to_string(vocab_size));
            check_probability(cand.prob, where + " candidate " + std::to_string(j));
            if (j > 0 && cand.prob > out[i].topk.back().prob)
                throw violation("TOPK_SORTED", where + " candidates are not sorted by descending probability");
            mass += cand.prob;
            out[i].topk.push_back(cand);
        }
        if (mass > 1.0 + kMassTolerance)
            throw violation("TOPK_MASS", where + " candidate mass " + std::to_string(mass) + " exceeds 1");
    }
    return out;
}

RemotePrior::RemotePrior(RemotePriorHandle handle) : handle_(std::move(handle)) {
    std::tie(host_, base_path_) = split_endpoint(handle_.endpoint);
    if (handle_.k_default == 0) throw ConfigError("remote prior k_default must be at least 1");
}

RemotePrior::~RemotePrior() = default;

namespace {

httplib::Client make_client(const std::string& host, std::chrono::milliseconds timeout) {
    httplib::Client client(host);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    return client;
}

[[noreturn]] void transport_failure(const std::string& what, httplib::Error err) {
    throw TransportError(what + ": " + httplib::to_string(err));
}

}  // namespace

const RemotePrior::Meta& RemotePrior::meta() const {
    if (meta_) return *meta_;
    auto client = make_client(host_, handle_.timeout);
    auto res = client.Get(base_path_ + "/v1/meta");
    if (!res) transport_failure("GET " + handle_.endpoint + "/v1/meta failed", res.error());
    if (res->status != 200)
        throw ProviderError("provider returned HTTP " + std::to_string(res->status) + " for /v1/meta: " + res->body);
    Meta meta;
    try {
        auto doc = json::parse(res->body);
        meta.vocab_size = doc.at("vocab_size").get<std::size_t>();
        meta.tokenizer_id = doc.at("tokenizer_id").get<std::string>();
    } catch (const json::exception& e) {
        throw violation("MALFORMED", std::string("bad /v1/meta response: ") + e.what());
    }
    if (meta.vocab_size < 2) throw violation("META_VOCAB", "vocab_size must be at least 2");
    if (!handle_.tokenizer_id.empty() && meta.tokenizer_id != handle_.tokenizer_id)
        throw violation("TOKENIZER_MISMATCH",
                        "provider tokenizer '" + meta.tokenizer_id + "' != expected '" + handle_.tokenizer_id + "'");
    meta_ = std::move(meta);
    return *meta_;
}

std::size_t RemotePrior::vocab_size() const {
    std::lock_guard lock(mutex_);
    return meta().vocab_size;
}

std::string RemotePrior::tokenizer_id() const {
    std::lock_guard lock(mutex_);
    return meta().tokenizer_id;
}

std::vector<PositionScore> RemotePrior::request(std::span<const TokenId> tokens, std::size_t k) const {
    const auto& m = meta();
    json req;
    req["tokens"] = std::vector<TokenId>(tokens.begin(), tokens.end());
    req["k"] = k;
    auto client = make_client(host_, handle_.timeout);
    auto res = client.Post(base_path_ + "/v1/score", req.dump(), "application/json");
    if (!res) transport_failure("POST " + handle_.endpoint + "/v1/score failed", res.error());
    if (res->status != 200)
        throw ProviderError("provider returned HTTP " + std::to_string(res->status) + " for /v1/score: " + res->body);
    auto scores = parse_score_response(res->body, tokens.size(), k, m.vocab_size);
    cached_tokens_.assign(tokens.begin(), tokens.end());
    cached_scores_ = scores;
    cached_k_ = k;
    return scores;
}

std::vector<PositionScore> RemotePrior::score_positions(std::span<const TokenId> tokens, std::size_t k) const {
    if (tokens.empty()) return {};
    std::lock_guard lock(mutex_);
    const std::size_t want = std::max(k, handle_.k_default);
    std::vector<PositionScore> scores;
    if (cached_k_ >= want && std::ranges::equal(cached_tokens_, tokens)) {
        scores = cached_scores_;
    } else {
        scores = request(tokens, want);
    }
    for (auto& s : scores) {
        if (s.topk.size() > k) s.topk.resize(k);
    }
    return scores;
}

TopKDistribution RemotePrior::next_token_dist(std::span<const TokenId> context, std::size_t k) const {
    std::lock_guard lock(mutex_);
    const std::size_t pos = context.size();
    std::vector<Candidate> candidates;
    const bool cached = pos < cached_tokens_.size() && k <= cached_k_ &&
                        std::equal(context.begin(), context.end(), cached_tokens_.begin());
    if (cached) {
        candidates = cached_scores_[pos].topk;
    } else {
        std::vector<TokenId> probe(context.begin(), context.end());
        probe.push_back(0);
        candidates = request(probe, std::max(k, handle_.k_default)).back().topk;
    }
    if (candidates.size() > k) candidates.resize(k);
    TopKDistribution out;
    for (const auto& c : candidates) out.mass += c.prob;
    out.candidates = std::move(candidates);
    return out;
}

double RemotePrior::token_prob(std::span<const TokenId> context, TokenId token) const {
    std::lock_guard lock(mutex_);
    const auto& m = meta();
    if (token >= m.vocab_size)
        throw ConfigError("token id " + std::to_string(token) + " outside provider vocabulary");
    const std::size_t pos = context.size();
    if (pos < cached_tokens_.size() && cached_tokens_[pos] == token &&
        std::equal(context.begin(), context.end(), cached_tokens_.begin()))
        return cached_scores_[pos].prob;
    std::vector<TokenId> probe(context.begin(), context.end());
    probe.push_back(token);
    return request(probe, handle_.k_default).back().prob;
}

std::unique_ptr<RemotePrior> open_remote_prior(const std::string& endpoint, std::size_t k_default,
                                               std::chrono::milliseconds timeout, std::string tokenizer_id) {
    return std::make_unique<RemotePrior>(RemotePriorHandle{endpoint, k_default, timeout, std::move(tokenizer_id)});
}

}  // namespace toedit
