#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "mock_provider.hpp"
#include "toedit/corpus.hpp"

using namespace toedit;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result toedit_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path workdir(const std::string& name) {
    auto dir = fs::temp_directory_path() / "toedit_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_language_corpus(const fs::path& dir, const std::string& name, std::uint64_t seed,
                               std::size_t docs = 30, const std::string& prefix = "d") {
    testing::SyntheticLanguage lang({.vocab = 60});
    auto path = dir / name;
    write_corpus(lang.generate(docs, 40, seed, prefix), path);
    return path;
}

json error_of(const Result& r) { return json::parse(r.err).at("error"); }

}  // namespace

TEST_CASE("train, edit and re-run from the manifest") {
    auto dir = workdir("edit");
    auto corpus = write_language_corpus(dir, "c.jsonl", 1);
    auto prior = (dir / "p.tp").string();
    REQUIRE(toedit_run({"train-prior", "--corpus", corpus.string(), "--out", prior}).code == 0);
    CHECK(fs::exists(prior + ".manifest.toml"));

    auto out = (dir / "e.jsonl").string();
    auto report = (dir / "r.json").string();
    auto docs = (dir / "r.csv").string();
    auto r = toedit_run({"--seed", "5", "edit", "--corpus", corpus.string(), "--prior", prior, "--p", "0.5", "--out",
                         out, "--report", report, "--doc-report", docs, "--generations", "2", "--jobs", "3"});
    REQUIRE(r.code == 0);
    auto summary = json::parse(slurp(report));
    CHECK(summary["generations"].size() == 2);
    CHECK(summary["generations"][0]["flagged"].get<int>() > 0);
    CHECK(slurp(docs).rfind("generation,doc_id,total,flagged,changed,fraction\n", 0) == 0);

    const auto first = slurp(out), first_report = slurp(report), first_docs = slurp(docs);
    const auto manifest = out + ".manifest.toml";
    const auto first_manifest = slurp(manifest);
    CHECK(first_manifest.find("seed=5") != std::string::npos);
    CHECK(first_manifest.find("tool-version=") != std::string::npos);
    REQUIRE(toedit_run({"--config", manifest}).code == 0);
    CHECK(slurp(out) == first);
    CHECK(slurp(report) == first_report);
    CHECK(slurp(docs) == first_docs);
    CHECK(slurp(manifest) == first_manifest);

    // Flags override file values.
    auto other = (dir / "o.jsonl").string();
    REQUIRE(toedit_run({"--config", manifest, "edit", "--out", other, "--manifest", other + ".m"}).code == 0);
    CHECK(slurp(other) == first);
}

TEST_CASE("p above one leaves the corpus byte-identical") {
    auto dir = workdir("identity");
    auto corpus = write_language_corpus(dir, "c.jsonl", 2);
    auto out = (dir / "e.jsonl").string();
    REQUIRE(toedit_run({"edit", "--corpus", corpus.string(), "--uniform", "--p", "1.01", "--out", out}).code == 0);
    CHECK(slurp(out) == slurp(corpus));
}

TEST_CASE("config errors enumerate every violation") {
    auto r = toedit_run({"edit", "--p", "-1", "--k", "0"});
    CHECK(r.code == cli::kExitConfig);
    auto e = error_of(r);
    CHECK(e["kind"] == "config");
    CHECK(e["violations"].size() == 5);

    CHECK(toedit_run({"simulate", "--out", "x.csv", "--d", "0", "--trials", "0"}).code == cli::kExitConfig);
    CHECK(toedit_run({}).code == cli::kExitConfig);
    CHECK(toedit_run({"edit", "--no-such-flag"}).code == cli::kExitConfig);
    CHECK(toedit_run({"--help"}).code == 0);
}

TEST_CASE("I/O errors exit with 3") {
    auto dir = workdir("io");
    auto r = toedit_run({"edit", "--corpus", (dir / "missing.jsonl").string(), "--uniform", "--out",
                         (dir / "x.jsonl").string()});
    CHECK(r.code == cli::kExitIo);
    CHECK(error_of(r)["kind"] == "io");
    CHECK(toedit_run({"--config", (dir / "missing.toml").string()}).code == cli::kExitIo);
    std::ofstream(dir / "bad.jsonl") << "{not json\n";
    CHECK(toedit_run({"mix", "--human", (dir / "bad.jsonl").string(), "--synthetic", (dir / "bad.jsonl").string(),
                      "--size", "1", "--out", (dir / "m.jsonl").string()})
              .code == cli::kExitIo);
}

TEST_CASE("remote prior through the CLI") {
    auto dir = workdir("remote");
    auto corpus_path = write_language_corpus(dir, "c.jsonl", 3);
    auto corpus = load_corpus(corpus_path);
    auto tok = Tokenizer::build_whitespace(corpus);
    UniformPrior uniform(tok.vocab_size(), tok.id());
    testing::MockProvider server(uniform, tok.id());

    auto local_out = (dir / "local.jsonl").string();
    auto remote_out = (dir / "remote.jsonl").string();
    REQUIRE(toedit_run({"--seed", "4", "edit", "--corpus", corpus_path.string(), "--uniform", "--p", "0", "--out",
                        local_out})
                .code == 0);
    REQUIRE(toedit_run({"--seed", "4", "edit", "--corpus", corpus_path.string(), "--remote", server.endpoint(), "--p",
                        "0", "--out", remote_out})
                .code == 0);
    CHECK(slurp(local_out) == slurp(remote_out));

    testing::MockProvider bad(uniform, tok.id(), testing::Fault::unsorted_topk);
    auto r = toedit_run({"edit", "--corpus", corpus_path.string(), "--remote", bad.endpoint(), "--p", "0", "--out",
                         (dir / "bad.jsonl").string()});
    CHECK(r.code == cli::kExitProvider);
    CHECK(error_of(r)["rule"] == "TOPK_SORTED");

    testing::MockProvider foreign(uniform, "another-tokenizer");
    r = toedit_run({"edit", "--corpus", corpus_path.string(), "--remote", foreign.endpoint(), "--out",
                    (dir / "f.jsonl").string()});
    CHECK(r.code == cli::kExitProvider);
    CHECK(error_of(r)["rule"] == "TOKENIZER_MISMATCH");

    r = toedit_run({"edit", "--corpus", corpus_path.string(), "--remote", "http://127.0.0.1:1", "--timeout-ms", "300",
                    "--out", (dir / "u.jsonl").string()});
    CHECK(r.code == cli::kExitProvider);
}

TEST_CASE("provider URL from the environment") {
    auto dir = workdir("env");
    auto corpus_path = write_language_corpus(dir, "c.jsonl", 4);
    auto tok = Tokenizer::build_whitespace(load_corpus(corpus_path));
    UniformPrior uniform(tok.vocab_size(), tok.id());
    testing::MockProvider server(uniform, tok.id());
    ::setenv("TOEDIT_PROVIDER_URL", server.endpoint().c_str(), 1);
    auto out = (dir / "e.jsonl").string();
    auto r = toedit_run({"edit", "--corpus", corpus_path.string(), "--p", "0", "--out", out});
    ::unsetenv("TOEDIT_PROVIDER_URL");
    REQUIRE(r.code == 0);
    CHECK(server.score_requests() > 0);
    CHECK(slurp(out + ".manifest.toml").find("remote=\"" + server.endpoint() + "\"") != std::string::npos);
}

TEST_CASE("simulate writes a trajectory and summary") {
    auto dir = workdir("simulate");
    auto csv = (dir / "s.csv").string();
    auto summary = (dir / "s.json").string();
    auto r = toedit_run({"simulate", "--mode", "both", "--d", "3", "--T", "20", "--m1-size", "4", "--generations", "4",
                         "--trials", "30", "--out", csv, "--summary", summary});
    REQUIRE(r.code == 0);
    auto s = json::parse(slurp(summary));
    CHECK(s.contains("collapse"));
    CHECK(s.contains("edit"));
    CHECK(s["collapse"]["collapse_slope"].get<double>() == doctest::Approx(3.0 / 16.0));
    std::istringstream lines(slurp(csv));
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 1 + 2 * 4);
}

TEST_CASE("analysis, selection, mixing and sampling commands") {
    auto dir = workdir("analyze");
    auto human = write_language_corpus(dir, "h.jsonl", 5, 30, "h");
    auto synth = write_language_corpus(dir, "s.jsonl", 6, 30, "s");
    auto prior = (dir / "p.tp").string();
    REQUIRE(toedit_run({"train-prior", "--corpus", human.string(), "--out", prior}).code == 0);

    auto ppl = (dir / "ppl.json").string();
    REQUIRE(toedit_run({"analyze", "ppl", "--corpus", human.string(), "--prior", prior, "--out", ppl}).code == 0);
    CHECK(json::parse(slurp(ppl))["histogram"]["observations"] == 30);
    REQUIRE(toedit_run({"analyze", "ppl", "--corpus", human.string(), "--prior", prior, "--chunk", "8", "--out", ppl})
                .code == 0);
    CHECK(json::parse(slurp(ppl))["histogram"]["observations"] == 30 * 5);

    auto tokens = (dir / "tokens.json").string();
    REQUIRE(toedit_run({"analyze", "tokens", "--corpus", human.string(), "--prior", prior, "--out", tokens}).code == 0);
    double total = 0.0;
    const auto token_report = json::parse(slurp(tokens));
    for (double p : token_report["percentages"]) total += p;
    CHECK(total == doctest::Approx(100.0).epsilon(1e-4));

    auto ngrams = (dir / "ngrams.json").string();
    auto profile = (dir / "target.profile").string();
    REQUIRE(toedit_run({"analyze", "ngrams", "--corpus", human.string(), "--tokenizer-prior", prior, "--orders", "1,2",
                        "--buckets", "512", "--profile", profile, "--out", ngrams})
                .code == 0);
    CHECK(json::parse(slurp(ngrams))["total_ngrams"] == 30 * (40 + 39));

    auto cov = (dir / "cov.json").string();
    REQUIRE(toedit_run({"analyze", "coverage", "--reference", human.string(), "--candidate", synth.string(), "--prior",
                        prior, "--out", cov})
                .code == 0);
    CHECK(json::parse(slurp(cov)).contains("overlap"));

    auto mixed = (dir / "mixed.jsonl").string();
    REQUIRE(toedit_run({"mix", "--human", human.string(), "--synthetic", synth.string(), "--alpha", "0.25", "--size",
                        "20", "--out", mixed})
                .code == 0);
    auto mix_corpus = load_corpus(mixed);
    CHECK(mix_corpus.size() == 20);

    auto chosen = (dir / "chosen.jsonl").string();
    auto weights = (dir / "w.csv").string();
    REQUIRE(toedit_run({"select-dsir", "--raw", mixed, "--target-profile", profile, "--tokenizer-prior", prior, "--k",
                        "5", "--out", chosen, "--weights", weights})
                .code == 0);
    CHECK(load_corpus(chosen).size() == 5);
    // A profile built with one tokenizer cannot score with another.
    CHECK(toedit_run({"select-dsir", "--raw", mixed, "--target-profile", profile, "--k", "5", "--out", chosen})
              .code == cli::kExitConfig);
    REQUIRE(toedit_run({"select-dsir", "--raw", mixed, "--target", human.string(), "--k", "5", "--out", chosen}).code ==
            0);

    auto sampled = (dir / "gen.jsonl").string();
    REQUIRE(toedit_run({"sample", "--prior", prior, "--docs", "4", "--length", "9", "--out", sampled}).code == 0);
    CHECK(load_corpus(sampled).size() == 4);
}
