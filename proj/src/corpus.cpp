#include "verifai/corpus.hpp"

#include "verifai/error.hpp"
#include "verifai/json_io.hpp"
#include "verifai/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>

namespace verifai {
namespace {

bool is_space(char c) noexcept {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string_view strip_leading_zeros(std::string_view s) noexcept {
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i] == '0') {
        ++i;
    }
    return s.substr(i);
}

} // namespace

bool is_valid_doc_id(std::string_view id) noexcept {
    return !id.empty() &&
           std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool doc_id_less(std::string_view a, std::string_view b) noexcept {
    auto na = strip_leading_zeros(a);
    auto nb = strip_leading_zeros(b);
    if (na.size() != nb.size()) {
        return na.size() < nb.size();
    }
    if (int c = na.compare(nb); c != 0) {
        return c < 0;
    }
    return a < b;
}

std::string merge_title_abstract(const Document& doc) {
    auto title = trim(doc.title);
    auto abstract = trim(doc.abstract);
    if (title.empty()) {
        return std::string(abstract);
    }
    if (abstract.empty()) {
        return std::string(title);
    }
    char last = title.back();
    std::string sep = (last == '.' || last == '!' || last == '?') ? " " : ". ";
    std::string out;
    out.reserve(title.size() + sep.size() + abstract.size());
    out.append(title).append(sep).append(abstract);
    return out;
}

std::size_t TokenCounter::prefix_bytes(std::string_view text, std::size_t tokens) const {
    if (count(text) <= tokens) {
        return text.size();
    }
    // Longest prefix ending at a word end that still fits.
    std::size_t best = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        bool word_end = !is_space(text[i]) && (i + 1 == text.size() || is_space(text[i + 1]));
        if (!word_end) {
            continue;
        }
        if (count(text.substr(0, i + 1)) > tokens) {
            break;
        }
        best = i + 1;
    }
    if (best > 0) {
        return best;
    }
    // One word is already too long: cut inside it on a UTF-8 boundary.
    std::size_t last_ok = 0;
    for (std::size_t i = 1; i <= text.size(); ++i) {
        if (i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) {
            continue;
        }
        if (count(text.substr(0, i)) > tokens) {
            if (last_ok == 0) {
                last_ok = i;  // always make progress
            }
            break;
        }
        last_ok = i;
    }
    return last_ok;
}

std::size_t WhitespaceTokenCounter::count(std::string_view text) const {
    std::size_t n = 0;
    bool in_word = false;
    for (char c : text) {
        bool space = is_space(c);
        if (!space && !in_word) {
            ++n;
        }
        in_word = !space;
    }
    return n;
}

std::size_t WhitespaceTokenCounter::prefix_bytes(std::string_view text, std::size_t tokens) const {
    std::size_t seen = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        bool space = is_space(text[i]);
        if (!space && !in_word) {
            if (seen == tokens) {
                // End of the previous word.
                std::size_t e = i;
                while (e > 0 && is_space(text[e - 1])) {
                    --e;
                }
                return e;
            }
            ++seen;
        }
        in_word = !space;
    }
    return text.size();
}

std::vector<Chunk> chunk_text(std::string_view doc_id, std::string_view text, std::size_t limit,
                              const TokenCounter& counter) {
    if (limit == 0) {
        throw_invalid("token limit must be >= 1");
    }
    std::vector<Chunk> chunks;
    auto push = [&](std::string_view piece, std::size_t tokens) {
        chunks.push_back(Chunk{std::string(doc_id), chunks.size(), std::string(piece), tokens});
    };

    const auto sentences = split_sentences(text);
    std::size_t open_begin = 0;
    std::size_t open_end = 0;
    std::size_t open_tokens = 0;
    bool open = false;

    auto close = [&] {
        if (open) {
            push(text.substr(open_begin, open_end - open_begin), open_tokens);
            open = false;
        }
    };

    for (const auto& s : sentences) {
        const auto sentence = s.of(text);
        const auto sentence_tokens = counter.count(sentence);
        if (sentence_tokens == 0) {
            continue;
        }
        if (open) {
            auto candidate = text.substr(open_begin, s.end - open_begin);
            auto candidate_tokens = counter.count(candidate);
            if (candidate_tokens <= limit) {
                open_end = s.end;
                open_tokens = candidate_tokens;
                continue;
            }
            close();
        }
        if (sentence_tokens <= limit) {
            open = true;
            open_begin = s.begin;
            open_end = s.end;
            open_tokens = sentence_tokens;
            continue;
        }
        // Oversized sentence: hard split at the limit.
        auto rest = sentence;
        while (!rest.empty()) {
            auto cut = counter.prefix_bytes(rest, limit);
            auto piece = trim(rest.substr(0, cut));
            if (!piece.empty()) {
                push(piece, counter.count(piece));
            }
            rest = trim(rest.substr(cut));
        }
    }
    close();
    return chunks;
}

std::vector<Chunk> chunk_document(const Document& doc, std::size_t limit, const TokenCounter& counter) {
    return chunk_text(doc.doc_id, merge_title_abstract(doc), limit, counter);
}

IngestResult ingest(std::istream& in, const IngestOptions& options) {
    IngestResult result;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        ++result.stats.read;
        Document doc;
        try {
            doc = document_from_json(nlohmann::json::parse(line));
        } catch (const std::exception& e) {
            std::string msg = "line " + std::to_string(line_no) + ": malformed record: " + e.what();
            if (options.on_malformed == MalformedPolicy::abort) {
                throw Error(ErrorKind::invalid_input, msg);
            }
            ++result.stats.malformed;
            result.warnings.push_back(std::move(msg));
            continue;
        }
        auto [it, inserted] = first_line.emplace(doc.doc_id, line_no);
        if (!inserted) {
            throw Error(ErrorKind::invalid_input,
                        "duplicate doc_id " + doc.doc_id + " on lines " + std::to_string(it->second) +
                            " and " + std::to_string(line_no));
        }
        if (options.filter_empty && is_blank(doc.abstract)) {
            ++result.stats.dropped;
            continue;
        }
        ++result.stats.kept;
        result.documents.push_back(std::move(doc));
    }
    return result;
}

IngestResult ingest(const std::filesystem::path& corpus_path, const IngestOptions& options) {
    std::ifstream in(corpus_path);
    if (!in) {
        throw Error(ErrorKind::not_found, "cannot open corpus file " + corpus_path.string());
    }
    return ingest(in, options);
}

} // namespace verifai
