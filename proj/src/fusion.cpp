#include "verifai/fusion.hpp"

#include "verifai/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

namespace verifai {

void FusionWeights::validate() const {
    auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
    if (!in_unit(alpha) || !in_unit(beta)) {
        throw_invalid("fusion weights must lie in [0,1]");
    }
    if (std::abs(alpha + beta - 1.0) > 1e-9) {
        throw_invalid("fusion weights must sum to 1 (alpha=" + std::to_string(alpha) +
                      ", beta=" + std::to_string(beta) + ")");
    }
}

RankedList normalize(RankedList hits) {
    double top = 0.0;
    for (const auto& h : hits) {
        if (!std::isfinite(h.raw_score) || h.raw_score < 0.0) {
            throw_invalid("cannot normalize score " + std::to_string(h.raw_score) + " of doc " + h.doc_id);
        }
        top = std::max(top, h.raw_score);
    }
    for (auto& h : hits) {
        h.normalized_score = top > 0.0 ? h.raw_score / top : 0.0;
        if (h.source == ScoreSource::lexical) {
            h.lexical_score = h.normalized_score;
        } else if (h.source == ScoreSource::semantic) {
            h.semantic_score = h.normalized_score;
        }
    }
    return hits;
}

RankedList fuse(const RankedList& lexical, const RankedList& semantic, const FusionWeights& weights, std::size_t k) {
    weights.validate();
    if (k == 0) {
        throw_invalid("k must be >= 1");
    }
    struct Parts {
        double lexical = 0.0;
        double semantic = 0.0;
    };
    std::map<std::string, Parts, DocIdLess> parts;
    for (const auto& h : lexical) {
        parts[h.doc_id].lexical = h.normalized_score;
    }
    for (const auto& h : semantic) {
        parts[h.doc_id].semantic = h.normalized_score;
    }
    RankedList out;
    out.reserve(parts.size());
    for (const auto& [id, p] : parts) {
        const double hybrid = weights.alpha * p.lexical + weights.beta * p.semantic;
        out.push_back(ScoredDoc{id, hybrid, hybrid, ScoreSource::hybrid, p.lexical, p.semantic});
    }
    const auto take = std::min(k, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(take), out.end(),
                      [](const ScoredDoc& a, const ScoredDoc& b) {
                          return ranks_before(a.normalized_score, a.doc_id, b.normalized_score, b.doc_id);
                      });
    out.resize(take);
    return out;
}

SearchOutcome HybridRetriever::lexical(std::string_view query, std::size_t depth, bool remove_query_stopwords) const {
    return lexical_->search(query, depth, LexicalSearchOptions{remove_query_stopwords});
}

SearchOutcome HybridRetriever::semantic(std::string_view query, std::size_t depth, bool rescore) const {
    SearchOutcome out;
    if (vectors_->size() == 0) {
        return out;
    }
    auto qv = embedder_->embed(query);
    VectorSearchOptions options;
    options.rescore = rescore;
    auto chunks = vectors_->search(qv, depth, options);
    out.hits = aggregate_to_docs(chunks);
    std::size_t clamped = 0;
    for (auto& h : out.hits) {
        if (h.raw_score < 0.0) {
            h.raw_score = 0.0;
            ++clamped;
        }
    }
    if (clamped > 0) {
        out.notices.push_back("clamped " + std::to_string(clamped) + " negative semantic scores to 0");
    }
    return out;
}

SearchOutcome HybridRetriever::hybrid(std::string_view query, const HybridOptions& options) const {
    options.weights.validate();
    if (options.k == 0) {
        throw_invalid("k must be >= 1");
    }
    if (options.pool < options.k) {
        throw_invalid("pool must be >= k");
    }
    SearchOutcome out;
    auto lex = lexical(query, options.pool, options.remove_query_stopwords);
    auto sem = semantic(query, options.pool, options.rescore);
    out.notices = lex.notices;
    out.notices.insert(out.notices.end(), sem.notices.begin(), sem.notices.end());

    auto weights = options.weights;
    if (lex.hits.empty() && !lex.notices.empty()) {
        weights = FusionWeights{0.0, 1.0};
        out.notices.emplace_back("falling back to semantic retrieval only");
    }
    out.hits = fuse(normalize(std::move(lex.hits)), normalize(std::move(sem.hits)), weights, options.k);
    return out;
}

std::vector<FusionWeights> parse_grid(std::string_view spec) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto colon = spec.find(':', start);
        auto piece = spec.substr(start, colon == std::string_view::npos ? spec.npos : colon - start);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
        if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty()) {
            throw_invalid("bad grid spec '" + std::string(spec) + "', expected start:stop:step");
        }
        parts.push_back(v);
        if (colon == std::string_view::npos) {
            break;
        }
        start = colon + 1;
    }
    if (parts.size() != 3) {
        throw_invalid("bad grid spec '" + std::string(spec) + "', expected start:stop:step");
    }
    const double lo = parts[0];
    const double hi = parts[1];
    const double step = parts[2];
    if (!(step > 0.0) || lo < 0.0 || hi > 1.0 || lo > hi) {
        throw_invalid("grid must satisfy 0 <= start <= stop <= 1 and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<FusionWeights> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        double alpha = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
        alpha = std::clamp(alpha, 0.0, 1.0);
        grid.push_back(FusionWeights{alpha, std::round((1.0 - alpha) * 1e12) / 1e12});
    }
    return grid;
}

} // namespace verifai
