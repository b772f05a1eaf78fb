#include "verifai/lexical_index.hpp"

#include "verifai/binary_io.hpp"
#include "verifai/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace verifai {
namespace {

constexpr std::string_view kMagic = "VFLEXIDX";
constexpr std::uint32_t kVersion = 1;

} // namespace

LexicalIndex LexicalIndex::build(std::span<const Document> docs, AnalyzerConfig config, Bm25Params params) {
    LexicalIndex index;
    index.config_ = std::move(config);
    index.params_ = params;

    std::vector<const Document*> ordered;
    ordered.reserve(docs.size());
    for (const auto& d : docs) {
        ordered.push_back(&d);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const Document* a, const Document* b) { return doc_id_less(a->doc_id, b->doc_id); });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i - 1]->doc_id == ordered[i]->doc_id) {
            throw Error(ErrorKind::invalid_input, "duplicate doc_id " + ordered[i]->doc_id);
        }
    }

    std::uint64_t total_length = 0;
    for (std::size_t ord = 0; ord < ordered.size(); ++ord) {
        const auto& doc = *ordered[ord];
        auto terms = analyze(merge_title_abstract(doc), index.config_);
        std::map<std::string, std::uint32_t> tf;
        for (auto& t : terms) {
            ++tf[std::move(t)];
        }
        index.doc_ids_.push_back(doc.doc_id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
        total_length += terms.size();
        for (const auto& [term, freq] : tf) {
            index.postings_[term].push_back(Posting{static_cast<std::uint32_t>(ord), freq});
        }
    }
    index.avg_doc_length_ =
        ordered.empty() ? 0.0 : static_cast<double>(total_length) / static_cast<double>(ordered.size());
    return index;
}

double LexicalIndex::idf(std::size_t df) const noexcept {
    const double n = static_cast<double>(doc_ids_.size());
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double LexicalIndex::term_weight(std::uint32_t tf, std::uint32_t doc_length) const noexcept {
    const double f = tf;
    const double norm = avg_doc_length_ > 0.0 ? static_cast<double>(doc_length) / avg_doc_length_ : 0.0;
    return f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * norm));
}

std::vector<std::string> LexicalIndex::query_terms(std::string_view query,
                                                   const LexicalSearchOptions& options) const {
    auto cfg = config_;
    cfg.remove_stopwords = config_.remove_stopwords && options.remove_query_stopwords;
    auto terms = analyze(query, cfg);
    std::vector<std::string> distinct;
    std::unordered_set<std::string> seen;
    for (auto& t : terms) {
        if (seen.insert(t).second) {
            distinct.push_back(std::move(t));
        }
    }
    return distinct;
}

SearchOutcome LexicalIndex::search(std::string_view query, std::size_t k, const LexicalSearchOptions& options) const {
    if (k == 0) {
        throw_invalid("k must be >= 1");
    }
    SearchOutcome out;
    auto terms = query_terms(query, options);
    if (terms.empty()) {
        out.notices.emplace_back("stopword-only query: no searchable terms");
        return out;
    }
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        const double w = idf(it->second.size());
        for (const auto& p : it->second) {
            acc[p.doc] += w * term_weight(p.tf, doc_lengths_[p.doc]);
        }
    }
    std::vector<std::pair<std::uint32_t, double>> scored(acc.begin(), acc.end());
    auto before = [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;  // ordinal order is doc_id order
    };
    const auto take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), before);
    scored.resize(take);
    out.hits.reserve(take);
    for (const auto& [ord, s] : scored) {
        out.hits.push_back(ScoredDoc{doc_ids_[ord], s, 0.0, ScoreSource::lexical, 0.0, 0.0});
    }
    return out;
}

double LexicalIndex::score(std::string_view query, std::string_view doc_id, const LexicalSearchOptions& options) const {
    auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id,
                               [](const std::string& a, std::string_view b) { return doc_id_less(a, b); });
    if (it == doc_ids_.end() || *it != doc_id) {
        return 0.0;
    }
    const auto ord = static_cast<std::uint32_t>(it - doc_ids_.begin());
    double s = 0.0;
    for (const auto& term : query_terms(query, options)) {
        auto pit = postings_.find(term);
        if (pit == postings_.end()) {
            continue;
        }
        auto p = std::lower_bound(pit->second.begin(), pit->second.end(), ord,
                                  [](const Posting& a, std::uint32_t o) { return a.doc < o; });
        if (p != pit->second.end() && p->doc == ord) {
            s += idf(pit->second.size()) * term_weight(p->tf, doc_lengths_[ord]);
        }
    }
    return s;
}

std::vector<std::pair<std::string, std::uint32_t>> LexicalIndex::postings_for(const std::string& term) const {
    std::vector<std::pair<std::string, std::uint32_t>> out;
    if (auto it = postings_.find(term); it != postings_.end()) {
        for (const auto& p : it->second) {
            out.emplace_back(doc_ids_[p.doc], p.tf);
        }
    }
    return out;
}

std::vector<std::uint8_t> LexicalIndex::serialize() const {
    binary::Writer w;
    w.put_magic(kMagic);
    w.put<std::uint32_t>(kVersion);
    w.put<double>(params_.k1);
    w.put<double>(params_.b);
    w.put<std::uint8_t>(config_.lowercase ? 1 : 0);
    w.put<std::uint8_t>(config_.normalize ? 1 : 0);
    w.put<std::uint8_t>(config_.remove_stopwords ? 1 : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(config_.stopwords.size()));
    for (const auto& s : config_.stopwords) {
        w.put_string(s);
    }
    w.put<std::uint64_t>(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        w.put_string(doc_ids_[i]);
        w.put<std::uint32_t>(doc_lengths_[i]);
    }
    w.put<std::uint64_t>(postings_.size());
    for (const auto& [term, list] : postings_) {
        w.put_string(term);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            w.put<std::uint32_t>(p.doc);
            w.put<std::uint32_t>(p.tf);
        }
    }
    return std::move(w.bytes());
}

LexicalIndex LexicalIndex::deserialize(std::span<const std::uint8_t> bytes) {
    binary::Reader r(bytes, "lexical index");
    r.expect_magic(kMagic);
    if (auto v = r.get<std::uint32_t>(); v != kVersion) {
        r.fail("unsupported version " + std::to_string(v));
    }
    LexicalIndex index;
    index.params_.k1 = r.get<double>();
    index.params_.b = r.get<double>();
    index.config_.lowercase = r.get<std::uint8_t>() != 0;
    index.config_.normalize = r.get<std::uint8_t>() != 0;
    index.config_.remove_stopwords = r.get<std::uint8_t>() != 0;
    index.config_.stopwords.clear();
    const auto n_stop = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_stop; ++i) {
        index.config_.stopwords.insert(r.get_string());
    }
    const auto n_docs = r.get<std::uint64_t>();
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        index.doc_ids_.push_back(r.get_string());
        index.doc_lengths_.push_back(r.get<std::uint32_t>());
        total += index.doc_lengths_.back();
    }
    index.avg_doc_length_ = n_docs == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n_docs);
    const auto n_terms = r.get<std::uint64_t>();
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        auto term = r.get_string();
        const auto n = r.get<std::uint32_t>();
        std::vector<Posting> list(n);
        for (auto& p : list) {
            p.doc = r.get<std::uint32_t>();
            p.tf = r.get<std::uint32_t>();
            if (p.doc >= n_docs) {
                r.fail("posting references unknown document");
            }
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    if (!r.at_end()) {
        r.fail("trailing bytes");
    }
    return index;
}

void LexicalIndex::save(const std::filesystem::path& path) const {
    binary::write_file(path.string(), serialize());
}

LexicalIndex LexicalIndex::load(const std::filesystem::path& path) {
    return deserialize(binary::read_file(path.string()));
}

} // namespace verifai
