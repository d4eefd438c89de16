#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "toedit/version.hpp"

namespace toedit::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kProviderEnv = "TOEDIT_PROVIDER_URL";

struct Command {
    CLI::App* app = nullptr;
    std::function<void()> validate;
    std::function<void(std::ostream&)> execute;
    std::function<std::string()> primary_output;
    PriorArgs* prior = nullptr;
    CLI::Option* remote_option = nullptr;
};

void add_tokenizer_options(CLI::App* sub, TokenizerArgs& t) {
    sub->add_option("--tokenizer", t.kind, "whitespace (vocabulary built from the inputs), byte or vocab");
    sub->add_option("--vocab", t.vocab, "vocabulary file, one token per line");
    sub->add_option("--unk", t.unk, "unknown-token entry of the vocabulary file");
    sub->add_option("--tokenizer-prior", t.from_prior, "reuse the tokenizer stored in this prior file");
}

CLI::Option* add_prior_options(CLI::App* sub, PriorArgs& p) {
    sub->add_option("--prior", p.file, "n-gram prior file from train-prior");
    auto* remote = sub->add_option("--remote", p.remote, std::string("scoring endpoint; defaults to $") + kProviderEnv);
    sub->add_flag("--uniform", p.uniform, "uniform prior over the tokenizer vocabulary");
    sub->add_option("--k-default", p.k_default, "candidates requested per position from a remote prior");
    sub->add_option("--timeout-ms", p.timeout_ms, "remote request timeout");
    return remote;
}

// ---------------------------------------------------------------------------
// Manifest: the resolved options of the selected command chain in the
// config-file syntax, so `toedit --config <manifest>` repeats the run.

bool looks_numeric(const std::string& s) {
    if (s.empty() || s == "nan" || s == "inf" || s == "-inf") return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && s.find_first_not_of("0123456789+-.eE") == std::string::npos;
}

std::string toml_scalar(const std::string& s) {
    if (s == "true" || s == "false" || looks_numeric(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::vector<std::string> split_default_list(const std::string& d) {
    std::vector<std::string> out;
    if (d.size() < 2) return out;
    std::string inner = d.substr(1, d.size() - 2);
    std::size_t start = 0;
    while (start <= inner.size()) {
        const auto comma = inner.find(',', start);
        auto item = inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string option_value(const CLI::Option* opt) {
    const bool is_flag = opt->get_expected_max() == 0;
    if (is_flag) return opt->count() > 0 && opt->as<bool>() ? "true" : "false";
    const bool is_list = opt->get_expected_max() > 1;
    std::vector<std::string> values;
    if (opt->count() > 0) {
        values = opt->results();
    } else if (is_list) {
        values = split_default_list(opt->get_default_str());
    } else {
        values.push_back(opt->get_default_str());
    }
    if (!is_list) return toml_scalar(values.empty() ? std::string() : values.back());
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + toml_scalar(values[i]);
    return out + "]";
}

void emit_options(const CLI::App* app, std::string& out) {
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
        const auto& name = opt->get_lnames().front();
        if (name == "help" || name == "config" || name == "version") continue;
        out += name + "=" + (name == "tool-version" ? toml_scalar(kVersion) : option_value(opt)) + "\n";
    }
}

std::string render_manifest(const CLI::App& root, const std::vector<const CLI::App*>& chain) {
    std::string out = "# toedit run manifest; repeat with: toedit --config <this file>\n";
    emit_options(&root, out);
    std::string section;
    for (const CLI::App* app : chain) {
        section += (section.empty() ? "" : ".") + app->get_name();
        out += "[" + section + "]\n";
        emit_options(app, out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Errors

int report_error(std::ostream& err, int code, std::string_view kind, const std::string& message,
                 const std::vector<std::string>& violations = {}, const std::string& rule = {}) {
    json e{{"kind", kind}, {"exit_code", code}, {"message", message}};
    if (!violations.empty()) e["violations"] = violations;
    if (!rule.empty()) e["rule"] = rule;
    err << json{{"error", e}}.dump() << "\n";
    return code;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const ValidationError& e) {
        return report_error(err, kExitConfig, "config", e.what(), e.violations());
    } catch (const ConfigError& e) {
        return report_error(err, kExitConfig, "config", e.what());
    } catch (const IoError& e) {
        return report_error(err, kExitIo, "io", e.what());
    } catch (const FormatError& e) {
        return report_error(err, kExitIo, "format", e.what());
    } catch (const ConformanceError& e) {
        return report_error(err, kExitProvider, "conformance", e.what(), {}, e.rule());
    } catch (const ProviderError& e) {
        return report_error(err, kExitProvider, "provider", e.what());
    } catch (const std::exception& e) {
        return report_error(err, kExitFailure, "internal", e.what());
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Token-level editing of training corpora, and the linear-regression model of its effect.",
                 "toedit"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "read options from a config file or run manifest");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs global;
    std::string tool_version = kVersion;
    app.add_option("--seed", global.seed, "global seed, fanned out to per-document and per-trial streams");
    app.add_option("--jobs", global.jobs, "worker threads; results do not depend on it");
    auto* manifest_opt =
        app.add_option("--manifest", global.manifest, "manifest path (default: <primary output>.manifest.toml)");
    app.add_option("--tool-version", tool_version, "version that wrote a manifest")->group("");

    std::vector<Command> commands;
    auto configurable = [](CLI::App* sub) {
        sub->configurable();
        return sub;
    };

    TrainPriorArgs train;
    {
        auto* sub = configurable(app.add_subcommand("train-prior", "train an interpolated n-gram prior"));
        sub->add_option("--corpus", train.corpus, "training corpus");
        sub->add_option("--format", train.format, "jsonl or text (one document per line)");
        add_tokenizer_options(sub, train.tokenizer);
        sub->add_option("--order", train.order, "n-gram order");
        sub->add_option("--discount", train.discount, "absolute discount");
        sub->add_option("--out", train.out, "prior file to write");
        commands.push_back({sub, [&] { validate(global, train); }, [&](std::ostream& o) { train_prior(global, train, o); },
                            [&] { return train.out; }});
    }

    EditArgs ed;
    {
        auto* sub = configurable(app.add_subcommand("edit", "resample high-probability tokens of a corpus"));
        sub->add_option("--corpus", ed.corpus, "input corpus");
        sub->add_option("--format", ed.format, "jsonl or text");
        add_tokenizer_options(sub, ed.tokenizer);
        auto* remote = add_prior_options(sub, ed.prior);
        sub->add_option("--p", ed.p, "edit positions whose token probability is >= p");
        sub->add_option("--strategy", ed.strategy, "top_k, top_p or rejection");
        sub->add_option("--k", ed.k, "top-k candidates");
        sub->add_option("--nucleus", ed.nucleus, "top-p mass");
        sub->add_option("--max-rejects", ed.max_rejects, "rejection-sampling attempts before falling back to top-k");
        sub->add_flag("--exclude-original", ed.exclude_original, "never redraw the original token");
        sub->add_option("--generations", ed.generations, "edit the output again this many times in total");
        sub->add_option("--out", ed.out, "edited corpus (last generation)");
        sub->add_option("--report", ed.report, "aggregate report JSON");
        sub->add_option("--doc-report", ed.doc_report, "per-document report CSV");
        sub->add_option("--generations-dir", ed.generations_dir, "also write every generation here");
        commands.push_back({sub, [&] { validate(global, ed); }, [&](std::ostream& o) { edit(global, ed, o); },
                            [&] { return ed.out; }, &ed.prior, remote});
    }

    SimulateArgs simargs;
    {
        auto* sub = configurable(app.add_subcommand("simulate", "linear-regression collapse and editing processes"));
        sub->add_option("--mode", simargs.mode, "collapse, edit or both");
        sub->add_option("--d", simargs.d, "feature dimension");
        sub->add_option("--T", simargs.T, "samples per generation");
        sub->add_option("--sigma2", simargs.sigma2, "label noise variance");
        sub->add_option("--w-star", simargs.w_star, "unit_first_axis or random_unit");
        sub->add_option("--m1-size", simargs.m1_size, "rows edited at the first editing step");
        sub->add_option("--eta", simargs.eta, "geometric decay of the edited-row count");
        sub->add_option("--generations", simargs.generations, "generations per trial");
        sub->add_option("--trials", simargs.trials, "Monte-Carlo trials");
        sub->add_option("--out", simargs.out, "trajectory CSV");
        sub->add_option("--summary", simargs.summary, "summary JSON with fits and bounds");
        commands.push_back({sub, [&] { validate(global, simargs); },
                            [&](std::ostream& o) { simulate(global, simargs, o); }, [&] { return simargs.out; }});
    }

    auto* analyze = app.add_subcommand("analyze", "corpus diagnostics");
    analyze->configurable();
    analyze->require_subcommand(1);
    analyze->fallthrough();

    PplArgs ppl;
    {
        auto* sub = configurable(analyze->add_subcommand("ppl", "perplexity histogram under a prior"));
        sub->add_option("--corpus", ppl.corpus, "corpus to score");
        sub->add_option("--format", ppl.format, "jsonl or text");
        add_tokenizer_options(sub, ppl.tokenizer);
        auto* remote = add_prior_options(sub, ppl.prior);
        sub->add_option("--chunk", ppl.chunk, "score windows of this many tokens instead of whole documents");
        sub->add_option("--bin-width", ppl.bin_width, "histogram bin width");
        sub->add_option("--max-ppl", ppl.max_ppl, "last histogram edge; larger values count as overflow");
        sub->add_option("--out", ppl.out, "result JSON");
        commands.push_back({sub, [&] { validate(global, ppl); }, [&](std::ostream& o) { analyze_ppl(global, ppl, o); },
                            [&] { return ppl.out; }, &ppl.prior, remote});
    }

    TokensArgs tokens;
    {
        auto* sub = configurable(analyze->add_subcommand("tokens", "token probability histogram under a prior"));
        sub->add_option("--corpus", tokens.corpus, "corpus to score");
        sub->add_option("--format", tokens.format, "jsonl or text");
        add_tokenizer_options(sub, tokens.tokenizer);
        auto* remote = add_prior_options(sub, tokens.prior);
        sub->add_option("--out", tokens.out, "result JSON");
        commands.push_back({sub, [&] { validate(global, tokens); },
                            [&](std::ostream& o) { analyze_tokens(global, tokens, o); }, [&] { return tokens.out; },
                            &tokens.prior, remote});
    }

    NgramsArgs ngrams;
    {
        auto* sub = configurable(analyze->add_subcommand("ngrams", "top n-grams and hashed n-gram features"));
        sub->add_option("--corpus", ngrams.corpus, "corpus");
        sub->add_option("--format", ngrams.format, "jsonl or text");
        add_tokenizer_options(sub, ngrams.tokenizer);
        sub->add_option("--n", ngrams.n, "n-gram length of the top list");
        sub->add_option("--top", ngrams.top, "entries in the top list");
        sub->add_option("--orders", ngrams.orders, "hashed n-gram orders")->delimiter(',');
        sub->add_option("--buckets", ngrams.buckets, "hash buckets");
        sub->add_option("--hash-seed", ngrams.hash_seed, "hash seed");
        sub->add_option("--profile", ngrams.profile, "write the hashed feature profile here");
        sub->add_option("--out", ngrams.out, "result JSON");
        commands.push_back({sub, [&] { validate(global, ngrams); },
                            [&](std::ostream& o) { analyze_ngrams(global, ngrams, o); }, [&] { return ngrams.out; }});
    }

    CoverageArgs coverage;
    {
        auto* sub = configurable(analyze->add_subcommand("coverage", "perplexity coverage of a candidate corpus"));
        sub->add_option("--reference", coverage.reference, "reference corpus");
        sub->add_option("--candidate", coverage.candidate, "candidate corpus");
        sub->add_option("--format", coverage.format, "jsonl or text");
        add_tokenizer_options(sub, coverage.tokenizer);
        auto* remote = add_prior_options(sub, coverage.prior);
        sub->add_option("--bin-width", coverage.bin_width, "histogram bin width");
        sub->add_option("--max-ppl", coverage.max_ppl, "last histogram edge");
        sub->add_option("--out", coverage.out, "result JSON");
        commands.push_back({sub, [&] { validate(global, coverage); },
                            [&](std::ostream& o) { analyze_coverage(global, coverage, o); },
                            [&] { return coverage.out; }, &coverage.prior, remote});
    }

    SelectDsirArgs dsir;
    {
        auto* sub = configurable(app.add_subcommand("select-dsir", "importance-resampled data selection"));
        sub->add_option("--raw", dsir.raw, "candidate pool");
        sub->add_option("--target", dsir.target, "target corpus");
        sub->add_option("--target-profile", dsir.target_profile, "target feature profile from analyze ngrams");
        sub->add_option("--format", dsir.format, "jsonl or text");
        add_tokenizer_options(sub, dsir.tokenizer);
        sub->add_option("--orders", dsir.orders, "hashed n-gram orders")->delimiter(',');
        sub->add_option("--buckets", dsir.buckets, "hash buckets");
        sub->add_option("--hash-seed", dsir.hash_seed, "hash seed");
        sub->add_option("--k", dsir.k, "documents to select");
        sub->add_option("--out", dsir.out, "selected corpus");
        sub->add_option("--weights", dsir.weights, "per-document log weights CSV");
        commands.push_back({sub, [&] { validate(global, dsir); }, [&](std::ostream& o) { select_dsir(global, dsir, o); },
                            [&] { return dsir.out; }});
    }

    MixArgs mixargs;
    {
        auto* sub = configurable(app.add_subcommand("mix", "alpha-mixture of human and synthetic corpora"));
        sub->add_option("--human", mixargs.human, "human corpus");
        sub->add_option("--synthetic", mixargs.synthetic, "synthetic corpus");
        sub->add_option("--format", mixargs.format, "jsonl or text");
        sub->add_option("--alpha", mixargs.alpha, "human share");
        sub->add_option("--size", mixargs.size, "documents in the mixture");
        sub->add_option("--out", mixargs.out, "mixed corpus");
        commands.push_back({sub, [&] { validate(global, mixargs); }, [&](std::ostream& o) { mix(global, mixargs, o); },
                            [&] { return mixargs.out; }});
    }

    SampleArgs sampleargs;
    {
        auto* sub = configurable(app.add_subcommand("sample", "ancestral sampling of a synthetic corpus"));
        add_tokenizer_options(sub, sampleargs.tokenizer);
        auto* remote = add_prior_options(sub, sampleargs.prior);
        sub->add_option("--docs", sampleargs.docs, "documents");
        sub->add_option("--length", sampleargs.length, "tokens per document");
        sub->add_option("--prefix", sampleargs.prefix, "document id prefix");
        sub->add_option("--out", sampleargs.out, "sampled corpus");
        commands.push_back({sub, [&] { validate(global, sampleargs); },
                            [&](std::ostream& o) { sample(global, sampleargs, o); }, [&] { return sampleargs.out; },
                            &sampleargs.prior, remote});
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        if (dynamic_cast<const CLI::FileError*>(&e)) return report_error(err, kExitIo, "io", e.what());
        return report_error(err, kExitConfig, "config", e.what());
    }

    auto selected = std::find_if(commands.begin(), commands.end(), [](const Command& c) { return c.app->parsed(); });
    if (selected == commands.end()) return report_error(err, kExitConfig, "config", "no command selected");
    Command& cmd = *selected;

    if (cmd.prior && cmd.prior->file.empty() && cmd.prior->remote.empty() && !cmd.prior->uniform) {
        if (const char* url = std::getenv(kProviderEnv); url && *url) {
            cmd.prior->remote = url;
            cmd.remote_option->clear();
            cmd.remote_option->add_result(std::string(url));
        }
    }

    return guarded(err, [&] {
        cmd.validate();
        if (global.manifest.empty()) {
            global.manifest = cmd.primary_output() + ".manifest.toml";
            manifest_opt->clear();
            manifest_opt->add_result(global.manifest);
        }
        std::vector<const CLI::App*> chain;
        for (const CLI::App* a = cmd.app; a != &app; a = a->get_parent()) chain.insert(chain.begin(), a);
        const std::string manifest = render_manifest(app, chain);
        {
            const auto parent = std::filesystem::path(global.manifest).parent_path();
            std::error_code ec;
            if (!parent.empty()) std::filesystem::create_directories(parent, ec);
            std::ofstream f(global.manifest, std::ios::binary | std::ios::trunc);
            if (!f) throw IoError("cannot write manifest " + global.manifest);
            f << manifest;
            if (!f.flush()) throw IoError("write failure on " + global.manifest);
        }
        cmd.execute(out);
    });
}

}  // namespace toedit::cli
