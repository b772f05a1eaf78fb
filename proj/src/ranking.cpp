#include "verifai/ranking.hpp"

#include "verifai/corpus.hpp"

namespace verifai {

const char* to_string(ScoreSource source) noexcept {
    switch (source) {
    case ScoreSource::lexical: return "lexical";
    case ScoreSource::semantic: return "semantic";
    case ScoreSource::hybrid: return "hybrid";
    }
    return "unknown";
}

bool ranks_before(double score_a, const std::string& id_a, double score_b, const std::string& id_b) noexcept {
    if (score_a != score_b) {
        return score_a > score_b;
    }
    return doc_id_less(id_a, id_b);
}

} // namespace verifai
