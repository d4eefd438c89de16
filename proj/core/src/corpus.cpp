#include "toedit/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "toedit/error.hpp"
#include "toedit/random.hpp"

namespace toedit {

using json = nlohmann::json;

std::string_view to_string(Origin origin) noexcept {
    switch (origin) {
        case Origin::human: return "human";
        case Origin::synthetic: return "synthetic";
        case Origin::edited: return "edited";
        case Origin::unknown: break;
    }
    return "unknown";
}

Origin parse_origin(std::string_view name) {
    if (name == "human") return Origin::human;
    if (name == "synthetic") return Origin::synthetic;
    if (name == "edited") return Origin::edited;
    if (name == "unknown") return Origin::unknown;
    throw FormatError("unknown origin '" + std::string(name) + "'");
}

Corpus::Corpus(std::vector<Document> documents, std::string provenance)
    : documents_(std::move(documents)), provenance_(std::move(provenance)) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(documents_.size());
    for (const auto& doc : documents_) {
        if (!seen.insert(doc.id).second) throw FormatError("duplicate document id '" + doc.id + "'");
    }
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

template <class Fn>
void for_each_word(std::string_view text, Fn&& fn) {
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i > start) fn(text.substr(start, i - start));
    }
}

}  // namespace

std::string_view to_string(TokenizerKind kind) noexcept {
    switch (kind) {
        case TokenizerKind::whitespace: return "whitespace";
        case TokenizerKind::byte: return "byte";
        case TokenizerKind::vocab_file: return "vocab_file";
    }
    return "byte";
}

TokenizerKind parse_tokenizer_kind(std::string_view name) {
    if (name == "whitespace") return TokenizerKind::whitespace;
    if (name == "byte") return TokenizerKind::byte;
    if (name == "vocab_file") return TokenizerKind::vocab_file;
    throw ConfigError("unknown tokenizer kind '" + std::string(name) + "'");
}

Tokenizer::Tokenizer(TokenizerKind kind, std::vector<std::string> tokens, std::optional<TokenId> unk_id)
    : kind_(kind), tokens_(std::move(tokens)), unk_id_(unk_id) {
    std::uint64_t h = fnv1a64(to_string(kind_));
    if (kind_ != TokenizerKind::byte) {
        index_.reserve(tokens_.size());
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            if (tokens_[i].empty()) throw ConfigError("empty token at id " + std::to_string(i));
            if (!index_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
                throw ConfigError("duplicate token '" + tokens_[i] + "'");
            h = fnv1a64(tokens_[i], h);
            h = fnv1a64(std::string_view("\0", 1), h);
        }
    }
    if (unk_id_ && *unk_id_ >= vocab_size())
        throw ConfigError("unk id " + std::to_string(*unk_id_) + " outside vocabulary");
    if (unk_id_) h = fnv1a64(std::to_string(*unk_id_), h);
    std::ostringstream os;
    os << to_string(kind_) << ':' << std::hex << h;
    id_ = os.str();
}

Tokenizer Tokenizer::byte() { return Tokenizer(TokenizerKind::byte, {}, std::nullopt); }

Tokenizer Tokenizer::whitespace(std::vector<std::string> tokens, std::optional<TokenId> unk_id) {
    return Tokenizer(TokenizerKind::whitespace, std::move(tokens), unk_id);
}

Tokenizer Tokenizer::from_vocab(std::vector<std::string> tokens, TokenId unk_id) {
    return Tokenizer(TokenizerKind::vocab_file, std::move(tokens), unk_id);
}

Tokenizer Tokenizer::load_vocab_file(const std::filesystem::path& path, std::string_view unk_token) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocab file " + path.string());
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        tokens.push_back(line);
    }
    auto it = std::find(tokens.begin(), tokens.end(), unk_token);
    if (it == tokens.end())
        throw FormatError("vocab file " + path.string() + " lacks unk token '" + std::string(unk_token) + "'");
    return from_vocab(std::move(tokens), static_cast<TokenId>(it - tokens.begin()));
}

Tokenizer Tokenizer::build_whitespace(const Corpus& corpus) { return build_whitespace(std::vector{&corpus}); }

Tokenizer Tokenizer::build_whitespace(const std::vector<const Corpus*>& corpora) {
    std::vector<std::string> tokens{"<unk>"};
    std::unordered_set<std::string> seen{"<unk>"};
    for (const Corpus* corpus : corpora) {
        for (const auto& doc : *corpus) {
            for_each_word(doc.text, [&](std::string_view w) {
                if (seen.emplace(w).second) tokens.emplace_back(w);
            });
        }
    }
    return whitespace(std::move(tokens), TokenId{0});
}

std::size_t Tokenizer::vocab_size() const noexcept {
    return kind_ == TokenizerKind::byte ? 256 : tokens_.size();
}

std::optional<TokenId> Tokenizer::lookup(std::string_view token) const {
    if (kind_ == TokenizerKind::byte) {
        if (token.size() != 1) return std::nullopt;
        return static_cast<TokenId>(static_cast<unsigned char>(token[0]));
    }
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string_view Tokenizer::token_text(TokenId id) const {
    if (id >= vocab_size()) throw ConfigError("token id " + std::to_string(id) + " outside vocabulary");
    if (kind_ == TokenizerKind::byte) {
        static const auto table = [] {
            std::array<char, 256> t{};
            for (int i = 0; i < 256; ++i) t[i] = static_cast<char>(i);
            return t;
        }();
        return {&table[id], 1};
    }
    return tokens_[id];
}

std::vector<TokenId> Tokenizer::encode(std::string_view text) const {
    std::vector<TokenId> out;
    if (kind_ == TokenizerKind::byte) {
        out.reserve(text.size());
        for (unsigned char c : text) out.push_back(c);
        return out;
    }
    for_each_word(text, [&](std::string_view w) {
        auto id = lookup(w);
        if (id) {
            out.push_back(*id);
        } else if (unk_id_) {
            out.push_back(*unk_id_);
        } else {
            throw ConfigError("token '" + std::string(w) + "' not in vocabulary and tokenizer has no unk id");
        }
    });
    return out;
}

TokenSequence Tokenizer::tokenize(const Document& doc) const {
    return TokenSequence{doc.id, encode(doc.text), id_};
}

std::string Tokenizer::detokenize(std::span<const TokenId> tokens) const {
    std::string out;
    if (kind_ == TokenizerKind::byte) {
        out.reserve(tokens.size());
        for (TokenId t : tokens) out.push_back(token_text(t)[0]);
        return out;
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out.append(token_text(tokens[i]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// I/O

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "json_lines" || name == "jsonl") return CorpusFormat::json_lines;
    if (name == "plain_text_per_line" || name == "text") return CorpusFormat::plain_text_per_line;
    throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

namespace {

Document parse_record(const std::string& line, std::size_t line_no, const std::string& filename) {
    auto fail = [&](const std::string& what) -> FormatError {
        return FormatError("line " + std::to_string(line_no) + ": " + what);
    };
    json record;
    try {
        record = json::parse(line);
    } catch (const json::parse_error& e) {
        throw fail(std::string("malformed JSON (") + e.what() + ")");
    }
    if (!record.is_object()) throw fail("record is not an object");
    auto text = record.find("text");
    if (text == record.end()) throw fail("missing field text");
    if (!text->is_string()) throw fail("field text is not a string");

    Document doc;
    doc.text = text->get<std::string>();
    if (auto id = record.find("id"); id != record.end() && !id->is_null()) {
        if (!id->is_string()) throw fail("field id is not a string");
        doc.id = id->get<std::string>();
    } else {
        doc.id = filename + "#" + std::to_string(line_no);
    }
    if (auto origin = record.find("origin"); origin != record.end() && !origin->is_null()) {
        if (!origin->is_string()) throw fail("field origin is not a string");
        try {
            doc.origin = parse_origin(origin->get<std::string>());
        } catch (const FormatError& e) {
            throw fail(e.what());
        }
    }
    if (auto meta = record.find("meta"); meta != record.end() && !meta->is_null()) {
        if (!meta->is_object()) throw fail("field meta is not an object");
        for (const auto& [key, value] : meta->items()) {
            if (!value.is_string()) throw fail("meta value for '" + key + "' is not a string");
            doc.meta.emplace(key, value.get<std::string>());
        }
    }
    return doc;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus " + path.string());
    const std::string filename = path.filename().string();

    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (format == CorpusFormat::plain_text_per_line) {
            docs.push_back(Document{filename + "#" + std::to_string(line_no), line, Origin::unknown, {}});
            continue;
        }
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        docs.push_back(parse_record(line, line_no, filename));
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    try {
        return Corpus(std::move(docs), path.string());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write corpus " + path.string());
    for (const auto& doc : corpus) {
        json record = json::object();
        record["id"] = doc.id;
        record["text"] = doc.text;
        record["origin"] = to_string(doc.origin);
        record["meta"] = doc.meta;
        out << record.dump() << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failure on " + path.string());
}

// ---------------------------------------------------------------------------
// Mixing and splitting

std::size_t human_share(double alpha, std::size_t target_size) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    // alpha * n is evaluated in long double and nudged down so exact products
    // such as 0.25 * 8 do not round up.
    long double product = static_cast<long double>(alpha) * static_cast<long double>(target_size);
    auto share = static_cast<std::size_t>(std::ceil(product - 1e-9L));
    return std::min(share, target_size);
}

namespace {

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

}  // namespace

Corpus mix_corpora(const Corpus& human, const Corpus& synthetic, double alpha,
                   std::size_t target_size, std::uint64_t seed) {
    const std::size_t n_human = human_share(alpha, target_size);
    const std::size_t n_synth = target_size - n_human;
    std::string shortfall;
    if (n_human > human.size())
        shortfall += "human corpus short by " + std::to_string(n_human - human.size()) + " documents (need " +
                     std::to_string(n_human) + ", have " + std::to_string(human.size()) + ")";
    if (n_synth > synthetic.size()) {
        if (!shortfall.empty()) shortfall += "; ";
        shortfall += "synthetic corpus short by " + std::to_string(n_synth - synthetic.size()) +
                     " documents (need " + std::to_string(n_synth) + ", have " +
                     std::to_string(synthetic.size()) + ")";
    }
    if (!shortfall.empty()) throw ConfigError("insufficient source documents: " + shortfall);

    Rng human_rng = make_rng(seed, "mix/human");
    Rng synth_rng = make_rng(seed, "mix/synthetic");
    Rng order_rng = make_rng(seed, "mix/order");

    std::vector<Document> docs;
    docs.reserve(target_size);
    for (std::size_t i : sample_indices(human.size(), n_human, human_rng)) docs.push_back(human[i]);
    for (std::size_t i : sample_indices(synthetic.size(), n_synth, synth_rng)) docs.push_back(synthetic[i]);
    for (std::size_t i = docs.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(order_rng, i));
        std::swap(docs[i - 1], docs[j]);
    }
    std::ostringstream prov;
    prov << "mix(alpha=" << alpha << ", target=" << target_size << ", seed=" << seed << ")";
    return Corpus(std::move(docs), prov.str());
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed) {
    if (corpus.empty()) throw ConfigError("cannot split an empty corpus");
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
    const std::size_t n = corpus.size();
    const auto first_size = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));

    Rng rng = make_rng(seed, "split");
    auto chosen = sample_indices(n, first_size, rng);
    std::vector<bool> in_first(n, false);
    for (std::size_t i : chosen) in_first[i] = true;

    std::vector<Document> a, b;
    a.reserve(first_size);
    b.reserve(n - first_size);
    for (std::size_t i = 0; i < n; ++i) (in_first[i] ? a : b).push_back(corpus[i]);
    return {Corpus(std::move(a), corpus.provenance() + " [split A]"),
            Corpus(std::move(b), corpus.provenance() + " [split B]")};
}

}  // namespace toedit
