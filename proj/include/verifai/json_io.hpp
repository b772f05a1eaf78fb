#pragma once

#include "verifai/corpus.hpp"
#include "verifai/ranking.hpp"
#include "verifai/verification.hpp"

#include <json.hpp>

namespace verifai {

/// Accepts doc_id as a digit string or a non-negative integer; title and
/// abstract are required strings, the rest optional.
Document document_from_json(const nlohmann::json& j);
nlohmann::json document_to_json(const Document& doc);

nlohmann::json to_json(const ScoredDoc& hit);
nlohmann::json to_json(const PairLabel& label);
nlohmann::json to_json(const ClaimVerdict& verdict);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const GeneratedAnswer& answer);

GeneratedAnswer answer_from_json(const nlohmann::json& j);

} // namespace verifai
