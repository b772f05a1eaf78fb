#pragma once

#include "verifai/document_store.hpp"
#include "verifai/embedder.hpp"
#include "verifai/generation.hpp"
#include "verifai/http_client.hpp"
#include "verifai/text.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

enum class NliLabel { support, contradict, no_evidence };

/// "SUPPORT", "CONTRADICT", "NO_EVIDENCE"
const char* to_string(NliLabel label) noexcept;
std::optional<NliLabel> parse_nli_label(std::string_view text);

/// Display classes of a verified sentence. `unverified` is only used when
/// verification was switched off for a request.
enum class ClaimStatus { supported, partially_supported, contradicted, unreferenced, unverified };

const char* to_string(ClaimStatus status) noexcept;

/// Zero-shot entailment instruction for chat-completion NLI adapters.
extern const std::string_view kNliInstruction;

struct Claim {
    std::string text;
    ByteSpan span;
    std::vector<std::string> cited_ids;

    friend bool operator==(const Claim&, const Claim&) = default;
};

struct NliResult {
    NliLabel label = NliLabel::no_evidence;
    double confidence = 0.0;
    /// The backend answered but its output did not name exactly one label.
    bool parse_warning = false;
};

class NliBackend {
public:
    virtual ~NliBackend() = default;
    virtual std::string name() const = 0;
    virtual NliResult classify(std::string_view claim, std::string_view evidence) const = 0;
};

/// Deterministic keyword backend for desk-scale runs. Finds the evidence
/// sentence covering most of the claim's content terms; with enough
/// coverage it answers SUPPORT, or CONTRADICT when that sentence carries a
/// negation cue the claim lacks. Otherwise NO_EVIDENCE.
class StubNliBackend final : public NliBackend {
public:
    explicit StubNliBackend(double min_coverage = 0.6) : min_coverage_(min_coverage) {}

    std::string name() const override { return "stub"; }
    NliResult classify(std::string_view claim, std::string_view evidence) const override;

private:
    double min_coverage_;
};

/// Classifier endpoint: POST {claim, evidence} -> {label, confidence}.
class HttpClassifierNliBackend final : public NliBackend {
public:
    explicit HttpClassifierNliBackend(HttpBackendConfig config);

    std::string name() const override { return "classifier:" + config_.model; }
    NliResult classify(std::string_view claim, std::string_view evidence) const override;

private:
    HttpBackendConfig config_;
};

/// Generative adapter: asks a chat backend with kNliInstruction at
/// temperature 0 and at most 350 tokens, then maps the completion to a label.
class ChatNliBackend final : public NliBackend {
public:
    explicit ChatNliBackend(const GenerationBackend& chat, std::string instruction = std::string(kNliInstruction));

    std::string name() const override { return "chat:" + chat_->name(); }
    NliResult classify(std::string_view claim, std::string_view evidence) const override;
    ChatRequest request_for(std::string_view claim, std::string_view evidence) const;

private:
    const GenerationBackend* chat_;
    std::string instruction_;
};

/// Maps a completion to a label case-insensitively. Completions naming no
/// label, or more than one, give NO_EVIDENCE with parse_warning set.
NliResult parse_nli_completion(std::string_view completion);

/// One claim per answer sentence. Citations attach to the sentence holding
/// them; a sentence made only of citations joins the previous sentence.
std::vector<Claim> segment_claims(const GeneratedAnswer& answer);
std::vector<Claim> segment_claims(std::string_view answer_text);

struct EvidencePair {
    std::size_t claim_index = 0;
    std::string doc_id;
    std::string evidence;
};

struct Pairing {
    std::vector<EvidencePair> pairs;
    /// Cited ids the store cannot resolve, deduplicated in first-seen order.
    std::vector<std::string> unresolved_ids;
};

/// One pair per (claim, resolvable cited id); evidence is the merged title+abstract.
Pairing pair_claims(std::span<const Claim> claims, const DocumentStore& store);

/// Throws invalid_input on blank claim or evidence.
NliResult classify(const EvidencePair& pair, std::string_view claim_text, const NliBackend& backend);

struct Aggregate {
    ClaimStatus status = ClaimStatus::unreferenced;
    /// Set when every label was NO_EVIDENCE.
    bool no_evidence = false;
};

/// all SUPPORT -> supported; else any CONTRADICT -> contradicted; else any
/// SUPPORT -> partially supported; else partially supported + no_evidence.
/// An empty span is treated like all NO_EVIDENCE.
Aggregate aggregate(std::span<const NliLabel> labels);

struct ClosestSentence {
    std::string doc_id;
    std::string sentence;
    double similarity = 0.0;
};

/// Evidence sentence with the highest dot product against the claim
/// embedding; ties go to the earliest sentence. Throws on empty evidence.
std::pair<std::string, double> closest_sentence(std::string_view claim, std::string_view evidence,
                                                const Embedder& embedder);

/// Cited ids absent from the answer's context ids, deduplicated in first-seen order.
std::vector<std::string> detect_hallucinated_ids(const GeneratedAnswer& answer);

struct PairLabel {
    std::string doc_id;
    NliLabel label = NliLabel::no_evidence;
    double confidence = 0.0;
    bool parse_warning = false;
    std::optional<std::string> error;
};

struct ClaimVerdict {
    Claim claim;
    std::vector<PairLabel> pair_labels;
    ClaimStatus status = ClaimStatus::unreferenced;
    /// Any of: no_evidence, parse_warning, backend_error, hallucinated_citation.
    std::vector<std::string> flags;
    std::optional<ClosestSentence> closest;
};

struct VerificationReport {
    std::vector<ClaimVerdict> claims;
    std::vector<std::string> hallucinated_ids;
};

struct VerifyOptions {
    /// Concurrent NLI calls for one answer.
    std::size_t max_in_flight = 8;
    bool find_closest = true;
};

/// segment -> pair -> classify -> aggregate -> closest sentence. A failing
/// pair is recorded as NO_EVIDENCE with a backend_error flag instead of
/// aborting the report.
VerificationReport verify_answer(const GeneratedAnswer& answer, const DocumentStore& store, const NliBackend& nli,
                                 const Embedder& embedder, const VerifyOptions& options = {});

/// Claims with status `unverified` and no pair labels, for requests that skip verification.
VerificationReport unverified_report(const GeneratedAnswer& answer);

} // namespace verifai
