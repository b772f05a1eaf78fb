#pragma once

#include "verifai/analyzer.hpp"
#include "verifai/corpus.hpp"
#include "verifai/ranking.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    friend bool operator==(const Bm25Params&, const Bm25Params&) = default;
};

struct Posting {
    std::uint32_t doc = 0;  // ordinal into doc_ids(), which is sorted by doc_id_less
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct LexicalSearchOptions {
    /// Apply stopword removal to the query (documents follow the index config).
    bool remove_query_stopwords = true;
};

/// BM25 inverted index over merged title+abstract texts. Immutable once built.
class LexicalIndex {
public:
    LexicalIndex() = default;

    /// Throws on duplicate doc_id.
    static LexicalIndex build(std::span<const Document> docs, AnalyzerConfig config = {}, Bm25Params params = {});

    /// BM25 with idf = ln(1 + (N - df + 0.5) / (df + 0.5)); at most k hits,
    /// descending score, ties by ascending doc_id.
    SearchOutcome search(std::string_view query, std::size_t k, const LexicalSearchOptions& options = {}) const;

    /// BM25 score of one query against one indexed document (0 when absent or unmatched).
    double score(std::string_view query, std::string_view doc_id, const LexicalSearchOptions& options = {}) const;

    std::vector<std::uint8_t> serialize() const;
    static LexicalIndex deserialize(std::span<const std::uint8_t> bytes);
    void save(const std::filesystem::path& path) const;
    static LexicalIndex load(const std::filesystem::path& path);

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }
    const std::map<std::string, std::vector<Posting>>& postings() const noexcept { return postings_; }
    const AnalyzerConfig& analyzer() const noexcept { return config_; }
    const Bm25Params& params() const noexcept { return params_; }

    /// Postings of one term with external ids, for inspection.
    std::vector<std::pair<std::string, std::uint32_t>> postings_for(const std::string& term) const;

    friend bool operator==(const LexicalIndex&, const LexicalIndex&) = default;

private:
    std::vector<std::string> query_terms(std::string_view query, const LexicalSearchOptions& options) const;
    double idf(std::size_t df) const noexcept;
    double term_weight(std::uint32_t tf, std::uint32_t doc_length) const noexcept;

    AnalyzerConfig config_;
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::map<std::string, std::vector<Posting>> postings_;
};

} // namespace verifai
