#pragma once

#include "verifai/document_store.hpp"
#include "verifai/http_client.hpp"
#include "verifai/ranking.hpp"
#include "verifai/text.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

/// Zero-shot referenced-QA instruction (the default).
extern const std::string_view kReferencedQaInstruction;
/// Instruction used with the citation-tuned model's template.
extern const std::string_view kFineTunedQaInstruction;

struct PromptOptions {
    std::string system_instruction{kReferencedQaInstruction};
    std::size_t max_docs = 10;
};

struct PromptBundle {
    std::string system_instruction;
    /// Query, then one "PUBMED:<id>\n<title+abstract>\n\n" block per document in rank order.
    std::string instruction;
    std::vector<std::string> context_ids;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

struct GenerationParams {
    int max_new_tokens = 1225;
    double repetition_penalty = 1.1;
    double temperature = 0.0;
};

struct CitationSpan {
    std::string doc_id;
    ByteSpan span;  // covers "PUBMED:<digits>"

    friend bool operator==(const CitationSpan&, const CitationSpan&) = default;
};

struct GeneratedAnswer {
    std::string text;
    std::vector<CitationSpan> citations;
    std::vector<std::string> context_ids;
    std::string backend_name;

    std::vector<std::string> cited_ids() const;
    friend bool operator==(const GeneratedAnswer&, const GeneratedAnswer&) = default;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    int max_tokens = 1225;
    double temperature = 0.0;
    double repetition_penalty = 1.0;
};

/// Chat-completion endpoint contract: request -> completion text.
class GenerationBackend {
public:
    virtual ~GenerationBackend() = default;
    virtual std::string name() const = 0;
    virtual std::string complete(const ChatRequest& request) const = 0;
};

/// Deterministic template generator: one sentence per context abstract,
/// each followed by its citation. Reads the abstracts back out of the prompt.
class StubGenerationBackend final : public GenerationBackend {
public:
    std::string name() const override { return "stub"; }
    std::string complete(const ChatRequest& request) const override;
};

/// Returns a fixed completion (or the result of a callback) regardless of the prompt.
class FixedGenerationBackend final : public GenerationBackend {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    explicit FixedGenerationBackend(std::string text, std::string name = "fixed");
    FixedGenerationBackend(Responder responder, std::string name);

    std::string name() const override { return name_; }
    std::string complete(const ChatRequest& request) const override { return responder_(request); }

private:
    Responder responder_;
    std::string name_;
};

/// OpenAI-compatible chat endpoint: POST {model, messages, max_tokens,
/// temperature[, repetition_penalty]} -> {choices: [{message: {content}}]}.
class HttpChatBackend final : public GenerationBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig config, std::string role = "generation",
                             bool send_repetition_penalty = true);

    std::string name() const override { return "http:" + config_.model; }
    std::string complete(const ChatRequest& request) const override;
    nlohmann::json request_body(const ChatRequest& request) const;

private:
    HttpBackendConfig config_;
    std::string role_;
    bool send_repetition_penalty_;
};

/// Throws when docs is empty or holds more than options.max_docs entries,
/// or when a doc_id is not in the store.
PromptBundle build_prompt(std::string_view query, const RankedList& docs, const DocumentStore& store,
                          const PromptOptions& options = {});

ChatRequest to_chat_request(const PromptBundle& bundle, const GenerationParams& params);

/// Empty or whitespace-only completions raise BackendError("generation", "empty answer").
GeneratedAnswer generate(const PromptBundle& bundle, const GenerationParams& params, const GenerationBackend& backend);

/// Case-insensitive "PUBMED:<digits>" with optional whitespace around the
/// colon; covers parenthesized and comma-grouped citations. Order and
/// duplicates are preserved.
std::vector<CitationSpan> extract_citations(std::string_view text);

/// Parses the "PUBMED:<id>\n<text>\n\n" blocks of an instruction.
std::vector<std::pair<std::string, std::string>> parse_abstract_blocks(std::string_view instruction);

} // namespace verifai
