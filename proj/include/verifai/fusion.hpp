#pragma once

#include "verifai/embedder.hpp"
#include "verifai/lexical_index.hpp"
#include "verifai/ranking.hpp"
#include "verifai/vector_index.hpp"

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace verifai {

/// Convex weights of the lexical (alpha) and semantic (beta) components.
struct FusionWeights {
    double alpha = 0.7;
    double beta = 0.3;

    static FusionWeights lexical_share(double alpha) { return {alpha, 1.0 - alpha}; }
    /// Throws unless both lie in [0,1] and sum to 1 within 1e-9.
    void validate() const;

    friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

/// Divides every raw score by the list maximum. Throws on negative or
/// non-finite scores; an all-zero list normalizes to zeros.
RankedList normalize(RankedList hits);

/// hybrid = alpha * lexical + beta * semantic over the union of both lists;
/// a document missing from one list contributes 0 there. Inputs must be normalized.
RankedList fuse(const RankedList& lexical, const RankedList& semantic, const FusionWeights& weights, std::size_t k);

struct HybridOptions {
    std::size_t k = 10;
    /// Depth retrieved from each retriever before fusion.
    std::size_t pool = 100;
    FusionWeights weights;
    bool rescore = true;
    bool remove_query_stopwords = true;
};

/// Lexical, semantic and fused retrieval over one pair of frozen indexes.
/// Stateless apart from the index handles; safe for concurrent queries.
class HybridRetriever {
public:
    HybridRetriever(const LexicalIndex& lexical, const VectorIndex& vectors, const Embedder& embedder)
        : lexical_(&lexical), vectors_(&vectors), embedder_(&embedder) {}

    SearchOutcome lexical(std::string_view query, std::size_t depth, bool remove_query_stopwords = true) const;
    /// Chunk hits aggregated to documents; negative dot products are clamped to 0 with a notice.
    SearchOutcome semantic(std::string_view query, std::size_t depth, bool rescore = true) const;
    SearchOutcome hybrid(std::string_view query, const HybridOptions& options) const;

    const LexicalIndex& lexical_index() const noexcept { return *lexical_; }
    const VectorIndex& vector_index() const noexcept { return *vectors_; }
    const Embedder& embedder() const noexcept { return *embedder_; }

private:
    const LexicalIndex* lexical_;
    const VectorIndex* vectors_;
    const Embedder* embedder_;
};

/// Parses "start:stop:step" over alpha, e.g. "0:1:0.1" -> 11 weight pairs.
std::vector<FusionWeights> parse_grid(std::string_view spec);

} // namespace verifai
