#include "verifai/json_io.hpp"

#include "verifai/error.hpp"

namespace verifai {

namespace {

std::string required_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw_invalid(std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw_invalid(std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
}


} // namespace

Document document_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw_invalid("record must be a JSON object");
    }
    Document doc;
    auto id = j.find("doc_id");
    if (id == j.end()) {
        throw_invalid("field 'doc_id' is missing");
    }
    if (id->is_number_unsigned() || (id->is_number_integer() && id->get<long long>() >= 0)) {
        doc.doc_id = std::to_string(id->get<unsigned long long>());
    } else if (id->is_string()) {
        doc.doc_id = id->get<std::string>();
    } else {
        throw_invalid("field 'doc_id' must be a digit string");
    }
    if (!is_valid_doc_id(doc.doc_id)) {
        throw_invalid("doc_id '" + doc.doc_id + "' is not a decimal identifier");
    }
    doc.title = required_string(j, "title");
    doc.abstract = required_string(j, "abstract");
    if (auto a = j.find("authors"); a != j.end() && !a->is_null()) {
        if (!a->is_array()) {
            throw_invalid("field 'authors' must be an array of strings");
        }
        for (const auto& name : *a) {
            if (!name.is_string()) {
                throw_invalid("field 'authors' must be an array of strings");
            }
            doc.authors.push_back(name.get<std::string>());
        }
    }
    doc.journal = optional_string(j, "journal");
    doc.pub_date = optional_string(j, "pub_date");
    return doc;
}

nlohmann::json document_to_json(const Document& doc) {
    nlohmann::json j{
        {"doc_id", doc.doc_id},
        {"title", doc.title},
        {"abstract", doc.abstract},
        {"authors", doc.authors},
    };
    if (doc.journal) {
        j["journal"] = *doc.journal;
    }
    if (doc.pub_date) {
        j["pub_date"] = *doc.pub_date;
    }
    return j;
}

nlohmann::json to_json(const ScoredDoc& hit) {
    return {
        {"doc_id", hit.doc_id},
        {"source", to_string(hit.source)},
        {"raw_score", hit.raw_score},
        {"normalized_score", hit.normalized_score},
        {"lexical_score", hit.lexical_score},
        {"semantic_score", hit.semantic_score},
    };
}

nlohmann::json to_json(const PairLabel& label) {
    nlohmann::json j{
        {"doc_id", label.doc_id},
        {"label", to_string(label.label)},
        {"confidence", label.confidence},
    };
    if (label.parse_warning) {
        j["parse_warning"] = true;
    }
    if (label.error) {
        j["error"] = *label.error;
    }
    return j;
}

nlohmann::json to_json(const ClaimVerdict& verdict) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : verdict.pair_labels) {
        labels.push_back(to_json(l));
    }
    nlohmann::json closest = nullptr;
    if (verdict.closest) {
        closest = {
            {"doc_id", verdict.closest->doc_id},
            {"sentence", verdict.closest->sentence},
            {"similarity", verdict.closest->similarity},
        };
    }
    return {
        {"text", verdict.claim.text},
        {"span", {{"begin", verdict.claim.span.begin}, {"end", verdict.claim.span.end}}},
        {"cited_ids", verdict.claim.cited_ids},
        {"pair_labels", std::move(labels)},
        {"status", to_string(verdict.status)},
        {"flags", verdict.flags},
        {"closest", std::move(closest)},
    };
}

nlohmann::json to_json(const VerificationReport& report) {
    nlohmann::json claims = nlohmann::json::array();
    for (const auto& c : report.claims) {
        claims.push_back(to_json(c));
    }
    return {{"claims", std::move(claims)}, {"hallucinated_ids", report.hallucinated_ids}};
}

nlohmann::json to_json(const GeneratedAnswer& answer) {
    return {
        {"answer", answer.text},
        {"cited_ids", answer.cited_ids()},
        {"context_ids", answer.context_ids},
        {"backend", answer.backend_name},
    };
}

GeneratedAnswer answer_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw_invalid("answer record must be a JSON object");
    }
    GeneratedAnswer a;
    a.text = required_string(j, "answer");
    if (auto ctx = j.find("context_ids"); ctx != j.end() && !ctx->is_null()) {
        for (const auto& id : *ctx) {
            a.context_ids.push_back(id.is_string() ? id.get<std::string>() : id.dump());
        }
    }
    a.backend_name = optional_string(j, "backend").value_or("");
    a.citations = extract_citations(a.text);
    return a;
}

} // namespace verifai
