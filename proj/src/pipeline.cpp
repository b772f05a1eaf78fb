#include "verifai/pipeline.hpp"

#include "verifai/error.hpp"
#include "verifai/json_io.hpp"

#include <chrono>

namespace verifai {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::unique_ptr<std::counting_semaphore<>> make_slots(std::size_t limit) {
    if (limit == 0) {
        throw_invalid("in-flight limit must be >= 1");
    }
    return std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(limit));
}

struct SlotGuard {
    explicit SlotGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~SlotGuard() { sem.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;
    std::counting_semaphore<>& sem;
};

} // namespace

BoundedGenerationBackend::BoundedGenerationBackend(const GenerationBackend& inner, std::size_t limit)
    : inner_(&inner), slots_(make_slots(limit)) {}

std::string BoundedGenerationBackend::complete(const ChatRequest& request) const {
    SlotGuard guard(*slots_);
    return inner_->complete(request);
}

BoundedNliBackend::BoundedNliBackend(const NliBackend& inner, std::size_t limit)
    : inner_(&inner), slots_(make_slots(limit)) {}

NliResult BoundedNliBackend::classify(std::string_view claim, std::string_view evidence) const {
    SlotGuard guard(*slots_);
    return inner_->classify(claim, evidence);
}

Pipeline::Pipeline(const IndexBundle& index, const Embedder& embedder, const GenerationBackend* generation,
                   const NliBackend* nli)
    : index_(&index),
      embedder_(&embedder),
      generation_(generation),
      nli_(nli),
      retriever_(index.lexical(), index.vectors(), embedder) {
    if (index.vectors().size() > 0 && embedder.dimension() != index.vectors().dimension()) {
        throw_invalid("embedder " + embedder.name() + " has dimension " + std::to_string(embedder.dimension()) +
                      " but the index has " + std::to_string(index.vectors().dimension()));
    }
}

SearchOutcome Pipeline::search(std::string_view query, const HybridOptions& options) const {
    if (is_blank(query)) {
        throw_invalid("query is empty");
    }
    return retriever_.hybrid(query, options);
}

VerificationReport Pipeline::verify(const GeneratedAnswer& answer, const VerifyOptions& options) const {
    if (nli_ == nullptr) {
        throw BackendError("nli", "no NLI backend configured");
    }
    return verify_answer(answer, index_->store(), *nli_, *embedder_, options);
}

AnswerResponse Pipeline::answer(std::string_view query, const AnswerOptions& options) const {
    if (is_blank(query)) {
        throw_invalid("query is empty");
    }
    if (generation_ == nullptr) {
        throw BackendError("generation", "no generation backend configured");
    }
    if (options.verify && nli_ == nullptr) {
        throw BackendError("nli", "no NLI backend configured");
    }
    AnswerResponse r;
    r.query = std::string(trim(query));

    auto t0 = Clock::now();
    auto outcome = retriever_.hybrid(r.query, options.retrieval);
    r.sources = std::move(outcome.hits);
    r.notices = std::move(outcome.notices);
    r.timings.retrieve_ms = elapsed_ms(t0);

    if (r.sources.empty()) {
        r.notices.emplace_back("no documents retrieved; nothing to answer from");
        r.verified = options.verify;
        return r;
    }

    t0 = Clock::now();
    RankedList context(r.sources.begin(),
                       r.sources.begin() + static_cast<std::ptrdiff_t>(std::min(r.sources.size(), options.prompt.max_docs)));
    auto bundle = build_prompt(r.query, context, index_->store(), options.prompt);
    try {
        r.answer = generate(bundle, options.generation, *generation_);
    } catch (const BackendError&) {
        throw;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_input) {
            throw;
        }
        throw BackendError("generation", e.what());
    } catch (const std::exception& e) {
        throw BackendError("generation", e.what());
    }
    r.timings.generate_ms = elapsed_ms(t0);

    t0 = Clock::now();
    if (options.verify) {
        r.report = verify_answer(r.answer, index_->store(), *nli_, *embedder_, options.verification);
        r.verified = true;
    } else {
        r.report = unverified_report(r.answer);
    }
    r.timings.verify_ms = elapsed_ms(t0);
    return r;
}

nlohmann::json hits_to_json(const RankedList& hits, const DocumentStore& store) {
    nlohmann::json out = nlohmann::json::array();
    std::size_t rank = 0;
    for (const auto& h : hits) {
        const auto* doc = store.find(h.doc_id);
        out.push_back({
            {"rank", ++rank},
            {"doc_id", h.doc_id},
            {"title", doc != nullptr ? doc->title : std::string()},
            {"hybrid_score", h.normalized_score},
            {"lexical_score", h.lexical_score},
            {"semantic_score", h.semantic_score},
        });
    }
    return out;
}

nlohmann::json to_json(const AnswerResponse& r, const DocumentStore& store) {
    auto report = to_json(r.report);
    return {
        {"query", r.query},
        {"sources", hits_to_json(r.sources, store)},
        {"answer", r.answer.text},
        {"cited_ids", r.answer.cited_ids()},
        {"context_ids", r.answer.context_ids},
        {"claims", std::move(report["claims"])},
        {"hallucinated_ids", std::move(report["hallucinated_ids"])},
        {"verified", r.verified},
        {"timings",
         {{"retrieve_ms", r.timings.retrieve_ms},
          {"generate_ms", r.timings.generate_ms},
          {"verify_ms", r.timings.verify_ms}}},
        {"notices", r.notices},
    };
}

} // namespace verifai
