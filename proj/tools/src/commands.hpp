#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "toedit/error.hpp"

namespace toedit::cli {

struct GlobalArgs {
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string manifest;
};

struct TokenizerArgs {
    std::string kind = "whitespace";
    std::string vocab;
    std::string unk = "<unk>";
    /// Reuse the tokenizer stored in this prior file.
    std::string from_prior;
};

struct PriorArgs {
    std::string file;
    std::string remote;
    bool uniform = false;
    std::size_t k_default = 8;
    std::size_t timeout_ms = 10000;
};

struct TrainPriorArgs {
    std::string corpus;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    std::size_t order = 3;
    double discount = 0.75;
    std::string out;
};

struct EditArgs {
    std::string corpus;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    PriorArgs prior;
    double p = 0.99;
    std::string strategy = "top_k";
    std::size_t k = 8;
    double nucleus = 0.99;
    std::size_t max_rejects = 16;
    bool exclude_original = false;
    std::size_t generations = 1;
    std::string out;
    std::string report;
    std::string doc_report;
    std::string generations_dir;
};

struct SimulateArgs {
    std::string mode = "both";
    std::size_t d = 10;
    std::size_t T = 100;
    double sigma2 = 1.0;
    std::string w_star = "unit_first_axis";
    std::size_t m1_size = 20;
    double eta = 0.5;
    std::size_t generations = 10;
    std::size_t trials = 500;
    std::string out;
    std::string summary;
};

struct PplArgs {
    std::string corpus;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    PriorArgs prior;
    std::size_t chunk = 0;
    double bin_width = 2.0;
    double max_ppl = 100.0;
    std::string out;
};

struct TokensArgs {
    std::string corpus;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    PriorArgs prior;
    std::string out;
};

struct NgramsArgs {
    std::string corpus;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    std::size_t n = 2;
    std::size_t top = 20;
    std::vector<std::size_t> orders{1, 2};
    std::size_t buckets = 10000;
    std::uint64_t hash_seed = 0;
    std::string profile;
    std::string out;
};

struct CoverageArgs {
    std::string reference;
    std::string candidate;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    PriorArgs prior;
    double bin_width = 2.0;
    double max_ppl = 100.0;
    std::string out;
};

struct SelectDsirArgs {
    std::string raw;
    std::string target;
    std::string target_profile;
    std::string format = "jsonl";
    TokenizerArgs tokenizer;
    std::vector<std::size_t> orders{1, 2};
    std::size_t buckets = 10000;
    std::uint64_t hash_seed = 0;
    std::size_t k = 0;
    std::string out;
    std::string weights;
};

struct MixArgs {
    std::string human;
    std::string synthetic;
    std::string format = "jsonl";
    double alpha = 0.5;
    std::size_t size = 0;
    std::string out;
};

struct SampleArgs {
    TokenizerArgs tokenizer;
    PriorArgs prior;
    std::size_t docs = 100;
    std::size_t length = 100;
    std::string prefix = "gen";
    std::string out;
};

/// Config error carrying every violated constraint.
class ValidationError : public ConfigError {
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Checks arguments without touching the filesystem; throws ValidationError.
void validate(const GlobalArgs&, const TrainPriorArgs&);
void validate(const GlobalArgs&, const EditArgs&);
void validate(const GlobalArgs&, const SimulateArgs&);
void validate(const GlobalArgs&, const PplArgs&);
void validate(const GlobalArgs&, const TokensArgs&);
void validate(const GlobalArgs&, const NgramsArgs&);
void validate(const GlobalArgs&, const CoverageArgs&);
void validate(const GlobalArgs&, const SelectDsirArgs&);
void validate(const GlobalArgs&, const MixArgs&);
void validate(const GlobalArgs&, const SampleArgs&);

void train_prior(const GlobalArgs&, const TrainPriorArgs&, std::ostream& out);
void edit(const GlobalArgs&, const EditArgs&, std::ostream& out);
void simulate(const GlobalArgs&, const SimulateArgs&, std::ostream& out);
void analyze_ppl(const GlobalArgs&, const PplArgs&, std::ostream& out);
void analyze_tokens(const GlobalArgs&, const TokensArgs&, std::ostream& out);
void analyze_ngrams(const GlobalArgs&, const NgramsArgs&, std::ostream& out);
void analyze_coverage(const GlobalArgs&, const CoverageArgs&, std::ostream& out);
void select_dsir(const GlobalArgs&, const SelectDsirArgs&, std::ostream& out);
void mix(const GlobalArgs&, const MixArgs&, std::ostream& out);
void sample(const GlobalArgs&, const SampleArgs&, std::ostream& out);

}  // namespace toedit::cli
