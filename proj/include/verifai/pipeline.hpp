#pragma once

#include "verifai/fusion.hpp"
#include "verifai/generation.hpp"
#include "verifai/index_bundle.hpp"
#include "verifai/verification.hpp"

#include <json.hpp>

#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

/// Caps concurrent calls into a wrapped backend across all requests.
class BoundedGenerationBackend final : public GenerationBackend {
public:
    BoundedGenerationBackend(const GenerationBackend& inner, std::size_t limit);

    std::string name() const override { return inner_->name(); }
    std::string complete(const ChatRequest& request) const override;

private:
    const GenerationBackend* inner_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

class BoundedNliBackend final : public NliBackend {
public:
    BoundedNliBackend(const NliBackend& inner, std::size_t limit);

    std::string name() const override { return inner_->name(); }
    NliResult classify(std::string_view claim, std::string_view evidence) const override;

private:
    const NliBackend* inner_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

struct Timings {
    double retrieve_ms = 0.0;
    double generate_ms = 0.0;
    double verify_ms = 0.0;
};

struct AnswerOptions {
    HybridOptions retrieval;
    bool verify = true;
    GenerationParams generation;
    PromptOptions prompt;
    VerifyOptions verification;
};

struct AnswerResponse {
    std::string query;
    RankedList sources;
    GeneratedAnswer answer;
    VerificationReport report;
    bool verified = false;
    Timings timings;
    std::vector<std::string> notices;
};

/// retrieve -> generate -> verify over one loaded index. Thread-safe.
class Pipeline {
public:
    /// `generation` and `nli` may be null when the backend is not configured.
    Pipeline(const IndexBundle& index, const Embedder& embedder, const GenerationBackend* generation,
             const NliBackend* nli);

    SearchOutcome search(std::string_view query, const HybridOptions& options) const;

    /// Throws invalid_input for a blank query and BackendError for an
    /// unconfigured or failing generation backend. NLI failures degrade per pair.
    AnswerResponse answer(std::string_view query, const AnswerOptions& options) const;

    VerificationReport verify(const GeneratedAnswer& answer, const VerifyOptions& options = {}) const;

    const IndexBundle& index() const noexcept { return *index_; }
    const HybridRetriever& retriever() const noexcept { return retriever_; }

private:
    const IndexBundle* index_;
    const Embedder* embedder_;
    const GenerationBackend* generation_;
    const NliBackend* nli_;
    HybridRetriever retriever_;
};

/// [{rank, doc_id, title, hybrid_score, lexical_score, semantic_score}]
nlohmann::json hits_to_json(const RankedList& hits, const DocumentStore& store);

/// {query, sources, answer, cited_ids, context_ids, claims, hallucinated_ids, verified, timings, notices}
nlohmann::json to_json(const AnswerResponse& response, const DocumentStore& store);

} // namespace verifai
