#pragma once

#include <string>
#include <vector>

namespace verifai {

enum class ScoreSource { lexical, semantic, hybrid };

const char* to_string(ScoreSource source) noexcept;

/// One retrieval hit. For hybrid hits the per-retriever normalized
/// components are kept alongside the fused score.
struct ScoredDoc {
    std::string doc_id;
    double raw_score = 0.0;
    double normalized_score = 0.0;
    ScoreSource source = ScoreSource::lexical;
    double lexical_score = 0.0;
    double semantic_score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

using RankedList = std::vector<ScoredDoc>;

/// A ranked list plus non-fatal diagnostics (e.g. a stopword-only query).
struct SearchOutcome {
    RankedList hits;
    std::vector<std::string> notices;
};

/// Descending by score, then ascending doc_id.
bool ranks_before(double score_a, const std::string& id_a, double score_b, const std::string& id_b) noexcept;

} // namespace verifai
