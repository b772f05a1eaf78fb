#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

/// Lexical preprocessing shared by the BM25 index and the hash embedder.
struct AnalyzerConfig {
    bool lowercase = true;
    /// NFC normalization, punctuation stripping and whitespace collapsing.
    bool normalize = true;
    bool remove_stopwords = true;
    std::set<std::string> stopwords = default_stopwords();

    static std::set<std::string> default_stopwords();

    friend bool operator==(const AnalyzerConfig&, const AnalyzerConfig&) = default;
};

/// One word per line; blank lines and lines starting with '#' are skipped.
std::set<std::string> load_stopwords(const std::filesystem::path& path);

std::vector<std::string> analyze(std::string_view text, const AnalyzerConfig& config);

} // namespace verifai
