#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "toedit/corpus.hpp"
#include "toedit/diagnostics.hpp"
#include "toedit/editor.hpp"
#include "toedit/prior.hpp"
#include "toedit/simulator.hpp"

namespace toedit::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

ValidationError::ValidationError(std::vector<std::string> violations)
    : ConfigError([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) msg += " " + v + ";";
          msg.pop_back();
          return msg;
      }()),
      violations_(std::move(violations)) {}

namespace {

class Violations {
public:
    void require(bool ok, std::string message) {
        if (!ok) items_.push_back(std::move(message));
    }
    void append(const std::vector<std::string>& more) { items_.insert(items_.end(), more.begin(), more.end()); }
    void raise() const {
        if (!items_.empty()) throw ValidationError(items_);
    }

private:
    std::vector<std::string> items_;
};

void check_global(Violations& v, const GlobalArgs& g) { v.require(g.jobs >= 1, "--jobs must be >= 1"); }

void check_format(Violations& v, const std::string& format) {
    v.require(format == "jsonl" || format == "text", "--format must be jsonl or text, got '" + format + "'");
}

void check_tokenizer(Violations& v, const TokenizerArgs& t) {
    const bool known = t.kind == "whitespace" || t.kind == "byte" || t.kind == "vocab";
    v.require(known, "--tokenizer must be whitespace, byte or vocab, got '" + t.kind + "'");
    v.require(t.kind != "vocab" || !t.vocab.empty(), "--vocab is required with --tokenizer vocab");
}

void check_prior(Violations& v, const PriorArgs& p) {
    const int sources = !p.file.empty() + !p.remote.empty() + p.uniform;
    v.require(sources > 0, "a prior is required: --prior FILE, --remote URL (or TOEDIT_PROVIDER_URL) or --uniform");
    v.require(sources <= 1, "choose only one of --prior, --remote and --uniform");
    v.require(p.k_default >= 1, "--k-default must be >= 1");
    v.require(p.timeout_ms >= 1, "--timeout-ms must be >= 1");
}

void check_orders(Violations& v, const std::vector<std::size_t>& orders, std::size_t buckets) {
    v.require(!orders.empty(), "--orders needs at least one n-gram order");
    v.require(std::all_of(orders.begin(), orders.end(), [](auto n) { return n >= 1; }), "--orders must be >= 1");
    v.require(buckets >= 1, "--buckets must be >= 1");
}

void check_edges(Violations& v, double bin_width, double max_ppl) {
    v.require(bin_width > 0.0, "--bin-width must be > 0");
    v.require(max_ppl > 0.0 && (bin_width <= 0.0 || max_ppl >= bin_width), "--max-ppl must be >= --bin-width");
}

CorpusFormat corpus_format(const std::string& f) {
    return f == "text" ? CorpusFormat::plain_text_per_line : CorpusFormat::json_lines;
}

Corpus load(const std::string& path, const std::string& format) { return load_corpus(path, corpus_format(format)); }

Tokenizer resolve_tokenizer(const TokenizerArgs& t, const std::vector<const Corpus*>& corpora) {
    if (!t.from_prior.empty()) return load_prior(t.from_prior).tokenizer();
    if (t.kind == "byte") return Tokenizer::byte();
    if (t.kind == "vocab") return Tokenizer::load_vocab_file(t.vocab, t.unk);
    return Tokenizer::build_whitespace(corpora);
}

struct ResolvedPrior {
    std::unique_ptr<PriorModel> model;
    std::optional<Tokenizer> tokenizer;
    std::string description;
};

ResolvedPrior resolve_prior(const PriorArgs& p, const TokenizerArgs& t, const std::vector<const Corpus*>& corpora) {
    ResolvedPrior out;
    if (!p.file.empty()) {
        auto prior = std::make_unique<NgramPrior>(load_prior(p.file));
        out.tokenizer = prior->tokenizer();
        out.description = "ngram:" + p.file;
        out.model = std::move(prior);
        return out;
    }
    out.tokenizer = resolve_tokenizer(t, corpora);
    if (p.uniform) {
        out.model = std::make_unique<UniformPrior>(out.tokenizer->vocab_size(), out.tokenizer->id());
        out.description = "uniform";
    } else {
        out.model = open_remote_prior(p.remote, p.k_default, std::chrono::milliseconds(p.timeout_ms),
                                      out.tokenizer->id());
        out.description = "remote:" + p.remote;
    }
    return out;
}

void ensure_parent(const fs::path& path) {
    const auto parent = path.parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_file(const fs::path& path, const std::string& content) {
    ensure_parent(path);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f << content;
    f.flush();
    if (!f) throw IoError("write failure on " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void save_corpus(const Corpus& c, const fs::path& path) {
    ensure_parent(path);
    write_corpus(c, path);
}

std::string num(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json histogram_json(const Histogram& h) {
    return json{{"edges", h.edges},       {"counts", h.counts},         {"overflow", h.overflow},
                {"in_range", h.total},    {"observations", h.observations()}, {"last_closed", h.last_closed}};
}

json entropy_or_null(const Histogram& h) { return h.total == 0 ? json(nullptr) : json(histogram_entropy(h)); }

std::vector<double> ppl_edges(double width, double max_ppl) {
    std::vector<double> edges;
    const auto bins = static_cast<std::size_t>(std::ceil(max_ppl / width - 1e-9));
    for (std::size_t i = 0; i <= bins; ++i) edges.push_back(std::min(static_cast<double>(i) * width, max_ppl));
    return edges;
}

json quantiles_json(const std::vector<double>& values) {
    if (values.empty()) return nullptr;
    return json{{"p01", quantile(values, 0.01)}, {"p50", quantile(values, 0.5)}, {"p99", quantile(values, 0.99)}};
}

std::string join_ids(const Tokenizer& tok, const std::vector<TokenId>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ' ';
        out += tok.token_text(ids[i]);
    }
    return out;
}

json report_json(const EditReport& r) {
    return json{{"total_tokens", r.total_tokens},
                {"flagged", r.flagged},
                {"changed", r.changed},
                {"edited_fraction", r.edited_fraction()},
                {"per_interval_hist", r.per_interval_hist}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation

void validate(const GlobalArgs& g, const TrainPriorArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.corpus.empty(), "--corpus is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    v.require(a.order >= 1, "--order must be >= 1");
    v.require(a.discount > 0.0 && a.discount < 1.0, "--discount must lie in (0, 1)");
    v.raise();
}

void validate(const GlobalArgs& g, const EditArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.corpus.empty(), "--corpus is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    check_prior(v, a.prior);
    v.require(a.generations >= 1, "--generations must be >= 1");
    EditPolicy policy;
    policy.p = a.p;
    policy.k = a.k;
    policy.nucleus = a.nucleus;
    policy.max_rejects = a.max_rejects;
    try {
        policy.strategy = parse_strategy(a.strategy);
    } catch (const ConfigError& e) {
        v.require(false, e.what());
    }
    v.append(policy.violations());
    v.raise();
}

void validate(const GlobalArgs& g, const SimulateArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.out.empty(), "--out is required");
    v.require(a.mode == "collapse" || a.mode == "edit" || a.mode == "both",
              "--mode must be collapse, edit or both, got '" + a.mode + "'");
    sim::SimConfig cfg;
    cfg.d = a.d;
    cfg.T = a.T;
    cfg.sigma2 = a.sigma2;
    cfg.m1_size = a.m1_size;
    cfg.eta = a.eta;
    cfg.generations = a.generations;
    cfg.trials = a.trials;
    cfg.jobs = g.jobs;
    try {
        cfg.w_star_mode = sim::parse_w_star_mode(a.w_star);
    } catch (const ConfigError& e) {
        v.require(false, e.what());
    }
    v.append(cfg.violations());
    v.raise();
}

void validate(const GlobalArgs& g, const PplArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.corpus.empty(), "--corpus is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    check_prior(v, a.prior);
    check_edges(v, a.bin_width, a.max_ppl);
    v.raise();
}

void validate(const GlobalArgs& g, const TokensArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.corpus.empty(), "--corpus is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    check_prior(v, a.prior);
    v.raise();
}

void validate(const GlobalArgs& g, const NgramsArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.corpus.empty(), "--corpus is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    v.require(a.n >= 1, "--n must be >= 1");
    v.require(a.top >= 1, "--top must be >= 1");
    check_orders(v, a.orders, a.buckets);
    v.raise();
}

void validate(const GlobalArgs& g, const CoverageArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.reference.empty(), "--reference is required");
    v.require(!a.candidate.empty(), "--candidate is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    check_prior(v, a.prior);
    check_edges(v, a.bin_width, a.max_ppl);
    v.raise();
}

void validate(const GlobalArgs& g, const SelectDsirArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.raw.empty(), "--raw is required");
    v.require(a.target.empty() != a.target_profile.empty(), "exactly one of --target and --target-profile is required");
    v.require(!a.out.empty(), "--out is required");
    v.require(a.k >= 1, "--k must be >= 1");
    check_format(v, a.format);
    check_tokenizer(v, a.tokenizer);
    check_orders(v, a.orders, a.buckets);
    v.raise();
}

void validate(const GlobalArgs& g, const MixArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.human.empty(), "--human is required");
    v.require(!a.synthetic.empty(), "--synthetic is required");
    v.require(!a.out.empty(), "--out is required");
    check_format(v, a.format);
    v.require(a.alpha >= 0.0 && a.alpha <= 1.0, "--alpha must lie in [0, 1]");
    v.require(a.size >= 1, "--size must be >= 1");
    v.raise();
}

void validate(const GlobalArgs& g, const SampleArgs& a) {
    Violations v;
    check_global(v, g);
    v.require(!a.out.empty(), "--out is required");
    check_prior(v, a.prior);
    check_tokenizer(v, a.tokenizer);
    v.require(!a.prior.file.empty() || a.tokenizer.kind != "whitespace" || !a.tokenizer.from_prior.empty(),
              "sampling without --prior needs a fixed vocabulary (--tokenizer byte|vocab or --tokenizer-prior)");
    v.require(a.docs >= 1, "--docs must be >= 1");
    v.require(a.length >= 1, "--length must be >= 1");
    v.raise();
}

// ---------------------------------------------------------------------------
// Commands

void train_prior(const GlobalArgs&, const TrainPriorArgs& a, std::ostream& out) {
    const Corpus corpus = load(a.corpus, a.format);
    const Tokenizer tok = resolve_tokenizer(a.tokenizer, {&corpus});
    const NgramPrior prior = train_ngram_prior(corpus, tok, a.order, a.discount);
    ensure_parent(a.out);
    save_prior(prior, a.out);
    out << json{{"prior", a.out},
                {"order", prior.order()},
                {"discount", prior.discount()},
                {"vocab_size", prior.vocab_size()},
                {"tokens", prior.total_tokens()},
                {"tokenizer_id", prior.tokenizer_id()}}
               .dump()
        << "\n";
}

void edit(const GlobalArgs& g, const EditArgs& a, std::ostream& out) {
    const Corpus corpus = load(a.corpus, a.format);
    auto prior = resolve_prior(a.prior, a.tokenizer, {&corpus});
    EditPolicy policy;
    policy.p = a.p;
    policy.strategy = parse_strategy(a.strategy);
    policy.k = a.k;
    policy.nucleus = a.nucleus;
    policy.max_rejects = a.max_rejects;
    policy.exclude_original = a.exclude_original;
    policy.seed = g.seed;

    const auto results = run_generations(corpus, *prior.tokenizer, *prior.model, policy, a.generations, g.jobs);

    save_corpus(results.back().corpus, a.out);
    if (!a.generations_dir.empty()) {
        for (std::size_t i = 0; i < results.size(); ++i)
            save_corpus(results[i].corpus, fs::path(a.generations_dir) / ("gen-" + std::to_string(i + 1) + ".jsonl"));
    }

    json gens = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        json entry = report_json(results[i].aggregate);
        entry["generation"] = i + 1;
        json errors = json::array();
        for (const auto& e : results[i].errors) errors.push_back({{"doc_id", e.doc_id}, {"message", e.message}});
        entry["errors"] = std::move(errors);
        gens.push_back(std::move(entry));
    }
    const json summary{{"prior", prior.description}, {"documents", corpus.size()}, {"generations", gens}};
    if (!a.report.empty()) write_json(a.report, summary);
    if (!a.doc_report.empty()) {
        std::string csv = "generation,doc_id,total,flagged,changed,fraction\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            for (const auto& d : results[i].documents) {
                csv += std::to_string(i + 1) + ',' + csv_field(d.doc_id) + ',' + std::to_string(d.report.total_tokens) +
                       ',' + std::to_string(d.report.flagged) + ',' + std::to_string(d.report.changed) + ',' +
                       num(d.report.edited_fraction()) + '\n';
            }
        }
        write_file(a.doc_report, csv);
    }
    out << summary.dump() << "\n";

    // Outputs are written either way; a failing document still fails the run.
    for (const auto& r : results)
        if (!r.errors.empty()) std::rethrow_exception(r.errors.front().error);
}

void simulate(const GlobalArgs& g, const SimulateArgs& a, std::ostream& out) {
    sim::SimConfig cfg;
    cfg.d = a.d;
    cfg.T = a.T;
    cfg.sigma2 = a.sigma2;
    cfg.w_star_mode = sim::parse_w_star_mode(a.w_star);
    cfg.m1_size = a.m1_size;
    cfg.eta = a.eta;
    cfg.generations = a.generations;
    cfg.trials = a.trials;
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    cfg.validate();

    std::string csv = "process,generation,mean_error,stderr,collapse_line,relaxed_bound,geometric_bound\n";
    json summary{{"d", cfg.d}, {"T", cfg.T}, {"sigma2", cfg.sigma2}, {"trials", cfg.trials},
                 {"generations", cfg.generations}};
    auto emit = [&](const std::string& process, const sim::SimTrajectory& t) {
        const auto& b = t.bounds;
        for (std::size_t i = 0; i < t.mean_error.size(); ++i) {
            csv += process + ',' + std::to_string(i + 1) + ',' + num(t.mean_error[i]) + ',' + num(t.stderr_error[i]) +
                   ',' + num(b.collapse_line(i + 1)) + ',' + num(b.relaxed) + ',' +
                   (b.geometric ? num(*b.geometric) : std::string()) + '\n';
        }
        const auto max_it = std::max_element(t.mean_error.begin(), t.mean_error.end());
        const auto max_at = static_cast<std::size_t>(max_it - t.mean_error.begin());
        json entry{{"max_mean_error", *max_it},
                   {"max_at_generation", max_at + 1},
                   {"stderr_at_max", t.stderr_error[max_at]},
                   {"final_mean_error", t.mean_error.back()},
                   {"collapse_slope", b.collapse_slope},
                   {"relaxed_bound", b.relaxed},
                   {"geometric_bound", b.geometric ? json(*b.geometric) : json(nullptr)},
                   {"trace_moments", {{"first", t.moments.first}, {"second", t.moments.second}}}};
        if (t.mean_error.size() >= 2) {
            const auto fit = sim::fit_line(t.mean_error);
            entry["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
        }
        summary[process] = std::move(entry);
    };
    if (a.mode != "edit") emit("collapse", sim::run_collapse_process(cfg));
    if (a.mode != "collapse") {
        cfg.validate();
        emit("edit", sim::run_editing_process(cfg));
        summary["edit"]["m1_size"] = cfg.m1_size;
        summary["edit"]["eta"] = cfg.eta;
    }
    write_file(a.out, csv);
    if (!a.summary.empty()) write_json(a.summary, summary);
    out << summary.dump() << "\n";
}

void analyze_ppl(const GlobalArgs& g, const PplArgs& a, std::ostream& out) {
    const Corpus corpus = load(a.corpus, a.format);
    auto prior = resolve_prior(a.prior, a.tokenizer, {&corpus});
    const auto profile =
        ppl_profile(corpus, *prior.tokenizer, *prior.model, ppl_edges(a.bin_width, a.max_ppl), a.chunk, g.jobs);
    json j{{"prior", prior.description},
           {"unit", a.chunk == 0 ? "document" : "chunk"},
           {"chunk", a.chunk},
           {"histogram", histogram_json(profile.histogram)},
           {"entropy", entropy_or_null(profile.histogram)},
           {"skipped_empty", profile.skipped_empty},
           {"quantiles", quantiles_json(profile.values)},
           {"values", profile.values}};
    write_json(a.out, j);
    j.erase("values");
    out << j.dump() << "\n";
}

void analyze_tokens(const GlobalArgs& g, const TokensArgs& a, std::ostream& out) {
    const Corpus corpus = load(a.corpus, a.format);
    auto prior = resolve_prior(a.prior, a.tokenizer, {&corpus});
    const auto profile = token_prob_profile(corpus, *prior.tokenizer, *prior.model, g.jobs);
    const json j{{"prior", prior.description},
                 {"histogram", histogram_json(profile.histogram)},
                 {"percentages", profile.percentages()},
                 {"high_confidence", profile.high_confidence},
                 {"entropy", entropy_or_null(profile.histogram)}};
    write_json(a.out, j);
    out << j.dump() << "\n";
}

void analyze_ngrams(const GlobalArgs&, const NgramsArgs& a, std::ostream& out) {
    const Corpus corpus = load(a.corpus, a.format);
    const Tokenizer tok = resolve_tokenizer(a.tokenizer, {&corpus});
    const auto profile = hash_ngram_features(corpus, tok, a.orders, a.buckets, a.hash_seed);
    if (!a.profile.empty()) {
        ensure_parent(a.profile);
        save_profile(profile, a.profile);
    }
    json top = json::array();
    for (const auto& t : top_ngrams(corpus, tok, a.n, a.top))
        top.push_back({{"ngram", join_ids(tok, t.ngram)}, {"ids", t.ngram}, {"count", t.count}});
    const auto occupied = std::count_if(profile.counts.begin(), profile.counts.end(), [](auto c) { return c > 0; });
    const json j{{"n", a.n},
                 {"top", top},
                 {"buckets", profile.buckets},
                 {"orders", profile.n_orders},
                 {"hash_seed", profile.hash_seed},
                 {"tokenizer_id", profile.tokenizer_id},
                 {"total_ngrams", profile.total_ngrams},
                 {"occupied_buckets", occupied}};
    write_json(a.out, j);
    out << j.dump() << "\n";
}

void analyze_coverage(const GlobalArgs& g, const CoverageArgs& a, std::ostream& out) {
    const Corpus reference = load(a.reference, a.format);
    const Corpus candidate = load(a.candidate, a.format);
    auto prior = resolve_prior(a.prior, a.tokenizer, {&reference, &candidate});
    const auto edges = ppl_edges(a.bin_width, a.max_ppl);
    const auto ref = ppl_profile(reference, *prior.tokenizer, *prior.model, edges, 0, g.jobs);
    const auto cand = ppl_profile(candidate, *prior.tokenizer, *prior.model, edges, 0, g.jobs);
    const auto m = coverage_report(ref.histogram, cand.histogram);
    const json j{{"prior", prior.description},
                 {"reference_occupied", m.reference_occupied},
                 {"candidate_occupied", m.candidate_occupied},
                 {"range_ratio", m.range_ratio},
                 {"overlap", m.overlap},
                 {"reference", {{"histogram", histogram_json(ref.histogram)}, {"quantiles", quantiles_json(ref.values)}}},
                 {"candidate",
                  {{"histogram", histogram_json(cand.histogram)}, {"quantiles", quantiles_json(cand.values)}}}};
    write_json(a.out, j);
    out << json{{"range_ratio", m.range_ratio}, {"overlap", m.overlap}}.dump() << "\n";
}

void select_dsir(const GlobalArgs& g, const SelectDsirArgs& a, std::ostream& out) {
    const Corpus raw = load(a.raw, a.format);
    std::optional<Corpus> target;
    if (!a.target.empty()) target = load(a.target, a.format);
    std::vector<const Corpus*> corpora{&raw};
    if (target) corpora.push_back(&*target);
    const Tokenizer tok = resolve_tokenizer(a.tokenizer, corpora);

    FeatureProfile target_profile = target ? hash_ngram_features(*target, tok, a.orders, a.buckets, a.hash_seed)
                                           : load_profile(a.target_profile);
    const FeatureProfile raw_profile =
        hash_ngram_features(raw, tok, target_profile.n_orders, target_profile.buckets, target_profile.hash_seed);
    const auto weights = dsir_weights(raw, target_profile, raw_profile, tok);
    const Corpus chosen = dsir_select(raw, weights, a.k, g.seed);
    save_corpus(chosen, a.out);
    if (!a.weights.empty()) {
        std::string csv = "doc_id,log_weight\n";
        for (const auto& [id, w] : weights.per_doc_log_weight) csv += csv_field(id) + ',' + num(w) + '\n';
        write_file(a.weights, csv);
    }
    out << json{{"selected", chosen.size()}, {"raw", raw.size()}, {"buckets", target_profile.buckets}}.dump() << "\n";
}

void mix(const GlobalArgs& g, const MixArgs& a, std::ostream& out) {
    const Corpus human = load(a.human, a.format);
    const Corpus synthetic = load(a.synthetic, a.format);
    const Corpus mixed = mix_corpora(human, synthetic, a.alpha, a.size, g.seed);
    save_corpus(mixed, a.out);
    const auto h = human_share(a.alpha, a.size);
    out << json{{"size", mixed.size()}, {"human", h}, {"synthetic", a.size - h}}.dump() << "\n";
}

void sample(const GlobalArgs& g, const SampleArgs& a, std::ostream& out) {
    auto prior = resolve_prior(a.prior, a.tokenizer, {});
    const Corpus c = sample_corpus(*prior.model, *prior.tokenizer, a.docs, a.length, g.seed, a.prefix);
    save_corpus(c, a.out);
    out << json{{"documents", c.size()}, {"length", a.length}, {"prior", prior.description}}.dump() << "\n";
}

}  // namespace toedit::cli
