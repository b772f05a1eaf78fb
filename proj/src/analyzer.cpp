#include "verifai/analyzer.hpp"

#include "verifai/error.hpp"
#include "verifai/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include <fstream>

namespace verifai {
namespace {

bool is_word_char(UChar32 cp) {
    return u_isalnum(cp) || (U_GET_GC_MASK(cp) & U_GC_M_MASK) != 0;
}

} // namespace

std::set<std::string> AnalyzerConfig::default_stopwords() {
    return {
        "a",       "about",   "above",   "after",   "again",   "against", "all",    "am",
        "an",      "and",     "any",     "are",     "as",      "at",      "be",     "because",
        "been",    "before",  "being",   "below",   "between", "both",    "but",    "by",
        "can",     "could",   "did",     "do",      "does",    "doing",   "down",   "during",
        "each",    "few",     "for",     "from",    "further", "had",     "has",    "have",
        "having",  "he",      "her",     "here",    "hers",    "herself", "him",    "himself",
        "his",     "how",     "i",       "if",      "in",      "into",    "is",     "it",
        "its",     "itself",  "just",    "me",      "more",    "most",    "my",     "myself",
        "no",      "nor",     "not",     "now",     "of",      "off",     "on",     "once",
        "only",    "or",      "other",   "our",     "ours",    "ourselves", "out",  "over",
        "own",     "same",    "she",     "should",  "so",      "some",    "such",   "than",
        "that",    "the",     "their",   "theirs",  "them",    "themselves", "then", "there",
        "these",   "they",    "this",    "those",   "through", "to",      "too",    "under",
        "until",   "up",      "very",    "was",     "we",      "were",    "what",   "when",
        "where",   "which",   "while",   "who",     "whom",    "why",     "will",   "with",
        "would",   "you",     "your",    "yours",   "yourself", "yourselves",
    };
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::not_found, "cannot open stopword file " + path.string());
    }
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto word = trim(line);
        if (word.empty() || word.front() == '#') {
            continue;
        }
        out.emplace(word);
    }
    return out;
}

std::vector<std::string> analyze(std::string_view text, const AnalyzerConfig& config) {
    std::vector<std::string> terms;
    if (text.empty()) {
        return terms;
    }
    auto ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    if (config.normalize) {
        UErrorCode status = U_ZERO_ERROR;
        const auto* nfc = icu::Normalizer2::getNFCInstance(status);
        if (U_SUCCESS(status)) {
            auto normalized = nfc->normalize(ustr, status);
            if (U_SUCCESS(status)) {
                ustr = std::move(normalized);
            }
        }
    }
    if (config.lowercase) {
        ustr.toLower(icu::Locale::getRoot());
    }

    icu::UnicodeString current;
    auto flush = [&] {
        if (current.isEmpty()) {
            return;
        }
        std::string term;
        current.toUTF8String(term);
        current.remove();
        if (config.remove_stopwords && config.stopwords.count(term) != 0) {
            return;
        }
        terms.push_back(std::move(term));
    };

    for (int32_t i = 0; i < ustr.length();) {
        UChar32 cp = ustr.char32At(i);
        bool keep = config.normalize ? is_word_char(cp) : !u_isUWhiteSpace(cp);
        if (keep) {
            current.append(cp);
        } else {
            flush();
        }
        i = ustr.moveIndex32(i, 1);
    }
    flush();
    return terms;
}

} // namespace verifai
