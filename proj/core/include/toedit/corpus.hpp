#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace toedit {

using TokenId = std::uint32_t;

enum class Origin { human, synthetic, edited, unknown };

std::string_view to_string(Origin origin) noexcept;
Origin parse_origin(std::string_view name);

struct Document {
    std::string id;
    std::string text;
    Origin origin = Origin::unknown;
    std::map<std::string, std::string> meta;

    friend bool operator==(const Document&, const Document&) = default;
};

/// Ordered collection of documents with unique ids.
class Corpus {
public:
    Corpus() = default;
    /// Throws FormatError on a duplicate id.
    explicit Corpus(std::vector<Document> documents, std::string provenance = {});

    const std::vector<Document>& documents() const noexcept { return documents_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }
    const Document& operator[](std::size_t i) const { return documents_[i]; }

    auto begin() const noexcept { return documents_.begin(); }
    auto end() const noexcept { return documents_.end(); }

    friend bool operator==(const Corpus& a, const Corpus& b) { return a.documents_ == b.documents_; }

private:
    std::vector<Document> documents_;
    std::string provenance_;
};

struct TokenSequence {
    std::string doc_id;
    std::vector<TokenId> tokens;
    std::string tokenizer_id;

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }
};

enum class TokenizerKind { whitespace, byte, vocab_file };

std::string_view to_string(TokenizerKind kind) noexcept;
TokenizerKind parse_tokenizer_kind(std::string_view name);

/// Token <-> id bijection. Whitespace and vocab-file tokenizers split on
/// ASCII whitespace; the byte tokenizer maps each byte to its value.
class Tokenizer {
public:
    static Tokenizer byte();
    /// `tokens[i]` gets id i. Throws ConfigError on duplicates or an unk id
    /// out of range.
    static Tokenizer whitespace(std::vector<std::string> tokens,
                                std::optional<TokenId> unk_id = std::nullopt);
    static Tokenizer from_vocab(std::vector<std::string> tokens, TokenId unk_id);
    /// One token per line; `unk_token` must appear in the file.
    static Tokenizer load_vocab_file(const std::filesystem::path& path,
                                     std::string_view unk_token = "<unk>");
    /// Whitespace vocabulary of every token in `corpus`, "<unk>" at id 0,
    /// remaining tokens in order of first appearance.
    static Tokenizer build_whitespace(const class Corpus& corpus);
    /// Same, over several corpora in turn.
    static Tokenizer build_whitespace(const std::vector<const class Corpus*>& corpora);

    TokenizerKind kind() const noexcept { return kind_; }
    std::size_t vocab_size() const noexcept;
    std::optional<TokenId> unk_id() const noexcept { return unk_id_; }
    /// Stable identifier derived from kind and vocabulary content.
    const std::string& id() const noexcept { return id_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    std::optional<TokenId> lookup(std::string_view token) const;
    std::string_view token_text(TokenId id) const;

    TokenSequence tokenize(const Document& doc) const;
    std::vector<TokenId> encode(std::string_view text) const;
    std::string detokenize(std::span<const TokenId> tokens) const;

private:
    Tokenizer(TokenizerKind kind, std::vector<std::string> tokens, std::optional<TokenId> unk_id);

    TokenizerKind kind_ = TokenizerKind::byte;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
    std::optional<TokenId> unk_id_;
    std::string id_;
};

enum class CorpusFormat { json_lines, plain_text_per_line };

CorpusFormat parse_corpus_format(std::string_view name);

/// Loads documents in file order. Records without an "id" get
/// "<filename>#<line>". Throws FormatError("line N: ...") on a bad record and
/// IoError if the file cannot be opened.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::json_lines);

/// JSON-Lines with fields id, text, origin, meta.
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Draws ceil(alpha * target_size) human documents and the remainder from
/// `synthetic`, both without replacement, then shuffles. Throws ConfigError
/// stating the shortfall when a source is too small.
Corpus mix_corpora(const Corpus& human, const Corpus& synthetic, double alpha,
                   std::size_t target_size, std::uint64_t seed);

/// Number of human documents mix_corpora draws.
std::size_t human_share(double alpha, std::size_t target_size);

/// First part holds floor(fraction * |c|) documents; original order is kept
/// within each part.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double fraction, std::uint64_t seed);

}  // namespace toedit
