#include "verifai/error.hpp"
#include "verifai/verification.hpp"

#include <doctest.h>

#include <atomic>

using namespace verifai;

namespace {

DocumentStore evidence_store() {
    return DocumentStore({{"1", "Aspirin and pain", "Aspirin reduces headache pain in adults.", {}, {}, {}},
                          {"2", "Statins", "Statins do not reduce headache pain.", {}, {}, {}},
                          {"3", "Unrelated", "Bone density was measured in rats.", {}, {}, {}}});
}

GeneratedAnswer answer(std::string text, std::vector<std::string> context) {
    GeneratedAnswer a;
    a.text = std::move(text);
    a.citations = extract_citations(a.text);
    a.context_ids = std::move(context);
    return a;
}

class CountingNli final : public NliBackend {
public:
    std::string name() const override { return "counting"; }
    NliResult classify(std::string_view, std::string_view evidence) const override {
        ++calls;
        if (evidence.find("Statins") != std::string_view::npos) {
            throw BackendError("nli", "boom");
        }
        return {NliLabel::support, 0.9, false};
    }
    mutable std::atomic<int> calls{0};
};

} // namespace

TEST_SUITE("verification") {
    TEST_CASE("label parsing") {
        CHECK(parse_nli_label("SUPPORT") == NliLabel::support);
        CHECK(parse_nli_label("contradiction") == NliLabel::contradict);
        CHECK(parse_nli_label("No Evidence") == NliLabel::no_evidence);
        CHECK_FALSE(parse_nli_label("maybe").has_value());
        CHECK(std::string(to_string(ClaimStatus::partially_supported)) == "PartiallySupported");
    }

    TEST_CASE("completion parsing") {
        CHECK(parse_nli_completion(" support\n").label == NliLabel::support);
        CHECK(parse_nli_completion("The answer is CONTRADICT.").label == NliLabel::contradict);
        auto both = parse_nli_completion("SUPPORT or CONTRADICT");
        CHECK(both.label == NliLabel::no_evidence);
        CHECK(both.parse_warning);
        auto none = parse_nli_completion("I cannot tell");
        CHECK(none.parse_warning);
    }

    TEST_CASE("segmentation attaches citations to their sentence") {
        auto claims = segment_claims("Pain drops (PUBMED:1). Bones grow (PUBMED:3, PUBMED:3). (PUBMED:2).");
        REQUIRE(claims.size() == 2);
        CHECK(claims[0].cited_ids == std::vector<std::string>{"1"});
        CHECK(claims[1].cited_ids == std::vector<std::string>{"3", "2"});
        CHECK(segment_claims("").empty());
    }

    TEST_CASE("pairing skips unresolvable ids") {
        auto store = evidence_store();
        auto claims = segment_claims("A (PUBMED:1, PUBMED:9). B (PUBMED:9).");
        auto p = pair_claims(claims, store);
        REQUIRE(p.pairs.size() == 1);
        CHECK(p.pairs[0].doc_id == "1");
        CHECK(p.unresolved_ids == std::vector<std::string>{"9"});
    }

    TEST_CASE("classify rejects blank inputs") {
        StubNliBackend nli;
        CHECK_THROWS_AS(classify({0, "1", "text"}, " ", nli), Error);
        CHECK_THROWS_AS(classify({0, "1", ""}, "claim", nli), Error);
    }

    TEST_CASE("stub NLI backend") {
        StubNliBackend nli;
        CHECK(nli.classify("Aspirin reduces headache pain", "Aspirin reduces headache pain in adults.").label ==
              NliLabel::support);
        CHECK(nli.classify("Statins reduce headache pain", "Statins do not reduce headache pain.").label ==
              NliLabel::contradict);
        CHECK(nli.classify("Aspirin reduces headache pain", "Bone density was measured in rats.").label ==
              NliLabel::no_evidence);
    }

    TEST_CASE("chat NLI adapter request layout") {
        FixedGenerationBackend chat("CONTRADICT");
        ChatNliBackend nli(chat);
        auto req = nli.request_for("c", "e");
        REQUIRE(req.messages.size() == 2);
        CHECK(req.messages[0].content == kNliInstruction);
        CHECK(req.messages[1].content == "Statement: c\nAbstract: e");
        CHECK(req.max_tokens == 350);
        CHECK(req.temperature == 0.0);
        CHECK(nli.classify("c", "e").label == NliLabel::contradict);
    }

    TEST_CASE("aggregation precedence") {
        using L = NliLabel;
        CHECK(aggregate(std::vector<L>{L::support, L::support}).status == ClaimStatus::supported);
        CHECK(aggregate(std::vector<L>{L::support, L::contradict}).status == ClaimStatus::contradicted);
        CHECK(aggregate(std::vector<L>{L::support, L::no_evidence}).status == ClaimStatus::partially_supported);
        auto ne = aggregate(std::vector<L>{L::no_evidence});
        CHECK(ne.status == ClaimStatus::partially_supported);
        CHECK(ne.no_evidence);
        CHECK(aggregate(std::vector<L>{}).no_evidence);
    }

    TEST_CASE("hallucinated ids") {
        auto a = answer("X (PUBMED:5). Y (PUBMED:1, PUBMED:5, PUBMED:6).", {"1", "2"});
        CHECK(detect_hallucinated_ids(a) == std::vector<std::string>{"5", "6"});
    }

    TEST_CASE("full report with statuses, flags and closest sentences") {
        auto store = evidence_store();
        HashEmbedder embedder({64, 0, 0.8f});
        StubNliBackend nli;
        auto a = answer("Aspirin reduces headache pain (PUBMED:1). Statins reduce headache pain (PUBMED:2). "
                        "Nothing cited here. Made up fact (PUBMED:8).",
                        {"1", "2", "3"});
        auto r = verify_answer(a, store, nli, embedder);
        REQUIRE(r.claims.size() == 4);
        CHECK(r.claims[0].status == ClaimStatus::supported);
        REQUIRE(r.claims[0].closest.has_value());
        CHECK(r.claims[0].closest->doc_id == "1");
        CHECK(r.claims[1].status == ClaimStatus::contradicted);
        CHECK(r.claims[2].status == ClaimStatus::unreferenced);
        CHECK(r.claims[2].pair_labels.empty());
        CHECK(std::find(r.claims[3].flags.begin(), r.claims[3].flags.end(), "hallucinated_citation") !=
              r.claims[3].flags.end());
        CHECK(r.hallucinated_ids == std::vector<std::string>{"8"});
    }

    TEST_CASE("a failing pair is recorded, not fatal") {
        auto store = evidence_store();
        HashEmbedder embedder({64, 0, 0.8f});
        CountingNli nli;
        auto a = answer("Pain claim (PUBMED:1, PUBMED:2).", {"1", "2"});
        auto r = verify_answer(a, store, nli, embedder, {2, true});
        REQUIRE(r.claims.size() == 1);
        CHECK(nli.calls == 2);
        const auto& labels = r.claims[0].pair_labels;
        REQUIRE(labels.size() == 2);
        CHECK(labels[1].error.has_value());
        CHECK(labels[1].label == NliLabel::no_evidence);
        CHECK(r.claims[0].status == ClaimStatus::partially_supported);
        CHECK(std::find(r.claims[0].flags.begin(), r.claims[0].flags.end(), "backend_error") != r.claims[0].flags.end());
    }

    TEST_CASE("closest sentence prefers the best match") {
        HashEmbedder embedder({64, 0, 0.8f});
        auto [sentence, sim] = closest_sentence("bone density", "Aspirin helps. Bone density was measured.", embedder);
        CHECK(sentence == "Bone density was measured.");
        CHECK(sim > 0.0);
        CHECK_THROWS(closest_sentence("x", "", embedder));
    }

    TEST_CASE("unverified report") {
        auto r = unverified_report(answer("One (PUBMED:1). Two.", {"1"}));
        REQUIRE(r.claims.size() == 2);
        CHECK(r.claims[0].status == ClaimStatus::unverified);
        CHECK(r.claims[0].pair_labels.empty());
    }
}
