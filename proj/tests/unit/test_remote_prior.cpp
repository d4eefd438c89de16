#include <doctest.h>

#include <functional>

#include "fixtures.hpp"
#include "mock_provider.hpp"
#include "toedit/editor.hpp"
#include "toedit/error.hpp"
#include "toedit/prior.hpp"

using namespace toedit;
using testing::Fault;
using testing::MockProvider;

namespace {

std::string rule_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ConformanceError& e) {
        return e.rule();
    }
    return "none";
}

std::string rows(const std::string& entries) { return R"({"per_position":[)" + entries + "]}"; }

}  // namespace

TEST_CASE("score response rules") {
    auto parse = [](const std::string& body, std::size_t n = 1) {
        return [=] { parse_score_response(body, n, 3, 10); };
    };
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":1,"prob":0.5}]})"))) == "none");
    CHECK(rule_of(parse("not json")) == "MALFORMED");
    CHECK(rule_of(parse(R"({"rows":[]})")) == "MALFORMED");
    CHECK(rule_of(parse(rows(R"({"prob":0.5})"), 2)) == "PER_POSITION_LENGTH");
    CHECK(rule_of(parse(rows(R"({"prob":0})"))) == "PROB_POSITIVE");
    CHECK(rule_of(parse(rows(R"({"prob":1.5})"))) == "PROB_RANGE");
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":1,"prob":0.1},{"token":2,"prob":0.1},)"
                             R"({"token":3,"prob":0.1},{"token":4,"prob":0.1}]})"))) == "TOPK_LENGTH");
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":10,"prob":0.5}]})"))) == "TOPK_RANGE");
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":1,"prob":0.1},{"token":2,"prob":0.3}]})"))) ==
          "TOPK_SORTED");
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":1,"prob":0.7},{"token":2,"prob":0.5}]})"))) ==
          "TOPK_MASS");
    // Mass within the tolerance is accepted.
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":1,"prob":0.6},{"token":2,"prob":0.4000005}]})"))) ==
          "none");
    CHECK(rule_of(parse(rows(R"({"prob":0.5,"topk":[{"token":-1,"prob":0.5}]})"))) == "MALFORMED");
}

TEST_CASE("remote uniform prior serves the local numbers") {
    UniformPrior local(7, "tok");
    MockProvider server(local, "tok");
    auto remote = open_remote_prior(server.endpoint(), 4, std::chrono::milliseconds{5000}, "tok");
    CHECK(remote->vocab_size() == 7);
    CHECK(remote->tokenizer_id() == "tok");
    std::vector<TokenId> seq{1, 2, 3, 6, 0};
    auto scores = remote->score_positions(seq, 3);
    auto expected = local.score_positions(seq, 3);
    REQUIRE(scores.size() == seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(scores[i].prob == expected[i].prob);
        CHECK(scores[i].topk == expected[i].topk);
    }
    const auto before = server.score_requests();
    CHECK(remote->token_prob(std::span(seq).first(2), 3) == local.token_prob({}, 3));
    CHECK(remote->next_token_dist(std::span(seq).first(2), 2).candidates ==
          local.next_token_dist({}, 2).candidates);
    CHECK(server.score_requests() == before);
    // An uncached context costs one probe.
    CHECK(remote->token_prob(std::vector<TokenId>{5}, 4) == local.token_prob({}, 4));
    CHECK(server.score_requests() == before + 1);
}

TEST_CASE("remote conformance faults surface as rule ids") {
    UniformPrior local(5);
    std::vector<TokenId> seq{0, 1, 2};
    auto check = [&](Fault fault) {
        MockProvider server(local, "", fault);
        auto remote = open_remote_prior(server.endpoint(), 3);
        return rule_of([&] { remote->score_positions(seq, 3); });
    };
    CHECK(check(Fault::none) == "none");
    CHECK(check(Fault::inflated_mass) == "TOPK_MASS");
    CHECK(check(Fault::unsorted_topk) == "TOPK_SORTED");
    CHECK(check(Fault::zero_prob) == "PROB_POSITIVE");
    CHECK(check(Fault::short_response) == "PER_POSITION_LENGTH");
}

TEST_CASE("remote tokenizer mismatch is refused") {
    UniformPrior local(5);
    MockProvider server(local, "provider-tok");
    auto remote = open_remote_prior(server.endpoint(), 3, std::chrono::milliseconds{5000}, "corpus-tok");
    CHECK(rule_of([&] { (void)remote->vocab_size(); }) == "TOKENIZER_MISMATCH");
}

TEST_CASE("remote HTTP errors and unreachable endpoints") {
    UniformPrior local(5);
    MockProvider server(local, "");
    auto remote = open_remote_prior(server.endpoint(), 3);
    // Out-of-range token ids are rejected by the provider with 422.
    CHECK_THROWS_AS(remote->score_positions(std::vector<TokenId>{9}, 2), ProviderError);

    auto dead = open_remote_prior("http://127.0.0.1:1", 3, std::chrono::milliseconds{500});
    CHECK_THROWS_AS(dead->score_positions(std::vector<TokenId>{0}, 2), TransportError);
    CHECK_THROWS_AS(open_remote_prior("ftp://example"), ConfigError);
}

TEST_CASE("editor output is identical under local and mock-remote priors") {
    testing::SyntheticLanguage lang({.vocab = 60});
    auto corpus = lang.generate(12, 40, 8, "doc");
    auto tok = Tokenizer::build_whitespace(corpus);

    SUBCASE("uniform") {
        UniformPrior local(tok.vocab_size(), tok.id());
        MockProvider server(local, tok.id());
        auto remote = open_remote_prior(server.endpoint(), 8, std::chrono::milliseconds{5000}, tok.id());
        EditPolicy policy;
        policy.p = 0.0;
        policy.seed = 12;
        auto a = edit_corpus(corpus, tok, local, policy);
        auto b = edit_corpus(corpus, tok, *remote, policy);
        CHECK(a.errors.empty());
        CHECK(b.errors.empty());
        CHECK(a.corpus == b.corpus);
        CHECK(a.aggregate.changed == b.aggregate.changed);
        CHECK(a.aggregate.changed > 0);
    }
    SUBCASE("n-gram") {
        auto local = train_ngram_prior(corpus, tok, 3, 0.75);
        MockProvider server(local, tok.id());
        auto remote = open_remote_prior(server.endpoint(), 8, std::chrono::milliseconds{5000}, tok.id());
        EditPolicy policy;
        policy.p = 0.3;
        policy.k = 4;
        policy.seed = 5;
        auto a = edit_corpus(corpus, tok, local, policy, 1);
        auto b = edit_corpus(corpus, tok, *remote, policy, 3);
        CHECK(b.errors.empty());
        CHECK(a.corpus == b.corpus);
        CHECK(a.aggregate.flagged == b.aggregate.flagged);
        CHECK(a.aggregate.flagged > 0);
    }
}
