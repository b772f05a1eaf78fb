#include "verifai/error.hpp"
#include "verifai/generation.hpp"

#include "mock_http.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace verifai;

namespace {

DocumentStore store() {
    return DocumentStore({{"11", "First title", "First abstract.", {}, {}, {}},
                          {"7", "Second title", "Second abstract.", {}, {}, {}}});
}

RankedList ranked(std::initializer_list<const char*> ids) {
    RankedList out;
    for (auto id : ids) {
        ScoredDoc d;
        d.doc_id = id;
        out.push_back(d);
    }
    return out;
}

} // namespace

TEST_SUITE("generation") {
    TEST_CASE("prompt lists the query then abstracts in rank order") {
        auto s = store();
        auto p = build_prompt("  What is it? ", ranked({"11", "7"}), s);
        CHECK(p.instruction == "What is it?\n\nAbstracts:\nPUBMED:11\nFirst title. First abstract.\n\n"
                               "PUBMED:7\nSecond title. Second abstract.\n\n");
        CHECK(p.context_ids == std::vector<std::string>{"11", "7"});
        CHECK(p.system_instruction == kReferencedQaInstruction);
        auto blocks = parse_abstract_blocks(p.instruction);
        REQUIRE(blocks.size() == 2);
        CHECK(blocks[1].first == "7");
        CHECK(blocks[1].second == "Second title. Second abstract.");
    }

    TEST_CASE("prompt argument checks") {
        auto s = store();
        CHECK_THROWS_AS(build_prompt("q", {}, s), Error);
        CHECK_THROWS_AS(build_prompt("q", ranked({"99"}), s), Error);
        PromptOptions one;
        one.max_docs = 1;
        CHECK_THROWS_AS(build_prompt("q", ranked({"11", "7"}), s, one), Error);
    }

    TEST_CASE("chat request carries system and user messages") {
        auto s = store();
        auto p = build_prompt("q", ranked({"7"}), s);
        auto req = to_chat_request(p, {});
        REQUIRE(req.messages.size() == 2);
        CHECK(req.messages[0].role == "system");
        CHECK(req.messages[1].content == p.instruction);
        CHECK(req.max_tokens == 1225);
        CHECK(req.repetition_penalty == 1.1);
    }

    TEST_CASE("citation extraction") {
        auto c = extract_citations("A (PUBMED:12). B (pubmed : 34, PUBMED:12). C PUBMED:x.");
        REQUIRE(c.size() == 3);
        CHECK(c[0].doc_id == "12");
        CHECK(c[1].doc_id == "34");
        CHECK(c[2].doc_id == "12");
        const std::string text = "See PUBMED:5.";
        auto one = extract_citations(text);
        REQUIRE(one.size() == 1);
        CHECK(one[0].span.of(text) == "PUBMED:5");
        CHECK(extract_citations("no refs").empty());
    }

    TEST_CASE("stub backend cites every context abstract") {
        auto s = store();
        auto p = build_prompt("q", ranked({"11", "7"}), s);
        StubGenerationBackend stub;
        auto a = generate(p, {}, stub);
        CHECK(a.cited_ids() == std::vector<std::string>{"11", "7"});
        CHECK(a.context_ids == p.context_ids);
        CHECK(a.backend_name == "stub");
        CHECK(generate(p, {}, stub) == a);
    }

    TEST_CASE("empty completions are backend errors") {
        auto s = store();
        auto p = build_prompt("q", ranked({"7"}), s);
        FixedGenerationBackend blank("  \n");
        CHECK_THROWS_AS(generate(p, {}, blank), BackendError);
    }

    TEST_CASE("http chat backend roundtrip") {
        testing::MockServer mock;
        nlohmann::json seen;
        mock.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
            seen = nlohmann::json::parse(req.body);
            res.set_content(R"({"choices":[{"message":{"content":"Answer (PUBMED:7)."}}]})", "application/json");
        });
        mock.server().Post("/broken", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"choices":[]})", "application/json");
        });
        mock.server().Post("/down", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
        mock.start();

        HttpChatBackend chat({mock.url("/v1/chat/completions"), "m1", "", std::chrono::milliseconds(2000)});
        auto s = store();
        auto a = generate(build_prompt("q", ranked({"7"}), s), {}, chat);
        CHECK(a.text == "Answer (PUBMED:7).");
        CHECK(seen["model"] == "m1");
        CHECK(seen["max_tokens"] == 1225);
        CHECK(seen["messages"].size() == 2);

        HttpChatBackend broken({mock.url("/broken"), "m1", "", std::chrono::milliseconds(2000)});
        CHECK_THROWS_AS(broken.complete({}), BackendError);
        HttpChatBackend down({mock.url("/down"), "m1", "", std::chrono::milliseconds(2000)});
        try {
            down.complete({});
            FAIL("expected BackendError");
        } catch (const BackendError& e) {
            CHECK(e.backend() == "generation");
            CHECK(e.http_status() == 503);
        }
    }
}
