#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

/// One abstract record. doc_id plays the PMID role: one or more decimal digits.
struct Document {
    std::string doc_id;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;
    std::optional<std::string> journal;
    std::optional<std::string> pub_date;

    friend bool operator==(const Document&, const Document&) = default;
};

bool is_valid_doc_id(std::string_view id) noexcept;

/// Numeric order on decimal ids ("2" < "10"); equal values fall back to the raw string.
bool doc_id_less(std::string_view a, std::string_view b) noexcept;

struct DocIdLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const noexcept { return doc_id_less(a, b); }
};

/// title + ". " + abstract; " " when the title already ends in . ! or ?.
std::string merge_title_abstract(const Document& doc);

class TokenCounter {
public:
    virtual ~TokenCounter() = default;
    virtual std::string name() const = 0;
    virtual std::size_t count(std::string_view text) const = 0;
    /// Byte length of the longest prefix of `text` holding at most `tokens`
    /// tokens. Returns text.size() when the whole text fits.
    virtual std::size_t prefix_bytes(std::string_view text, std::size_t tokens) const;
};

/// Counts maximal runs of non-whitespace bytes.
class WhitespaceTokenCounter final : public TokenCounter {
public:
    std::string name() const override { return "whitespace"; }
    std::size_t count(std::string_view text) const override;
    std::size_t prefix_bytes(std::string_view text, std::size_t tokens) const override;
};

struct Chunk {
    std::string doc_id;
    std::size_t chunk_index = 0;
    std::string text;
    std::size_t token_count = 0;

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

inline constexpr std::size_t kDefaultTokenLimit = 512;

/// Greedy packing of whole sentences into chunks of at most `limit` tokens.
/// A sentence longer than `limit` is hard-split at the limit.
std::vector<Chunk> chunk_text(std::string_view doc_id, std::string_view text, std::size_t limit,
                              const TokenCounter& counter);
std::vector<Chunk> chunk_document(const Document& doc, std::size_t limit, const TokenCounter& counter);

enum class MalformedPolicy { abort, skip };

struct IngestOptions {
    bool filter_empty = true;
    MalformedPolicy on_malformed = MalformedPolicy::abort;
};

struct CorpusStats {
    std::size_t read = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::size_t malformed = 0;

    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

struct IngestResult {
    std::vector<Document> documents;
    CorpusStats stats;
    std::vector<std::string> warnings;
};

/// Reads line-delimited JSON records {doc_id, title, abstract, authors?, journal?, pub_date?}.
/// Blank lines are ignored. Duplicate ids abort and name both line numbers.
IngestResult ingest(std::istream& in, const IngestOptions& options = {});
IngestResult ingest(const std::filesystem::path& corpus_path, const IngestOptions& options = {});

} // namespace verifai
