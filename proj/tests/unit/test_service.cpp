#include "fixture.hpp"
#include "schema.hpp"

#include "verifai/service.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace verifai;

namespace {

struct Env {
    fixture::Fixture fx = fixture::make_fixture();
    std::shared_ptr<const IndexBundle> bundle =
        std::make_shared<const IndexBundle>(fixture::build_fixture_index(fx));

    Service service(ServiceConfig config = {}) const {
        auto backends = make_backends(config, bundle.get());
        return Service(config, bundle, std::move(backends));
    }
};

const Env& env() {
    static const Env e;
    return e;
}

nlohmann::json schema() {
    return testing::load_json_file(std::string(VERIFAI_SOURCE_DIR) + "/docs/answer_response.schema.json");
}

} // namespace

TEST_SUITE("service") {
    TEST_CASE("search handler") {
        auto s = env().service();
        auto r = s.search(nlohmann::json{{"query", env().fx.queries[0].body}, {"k", 5}}.dump());
        REQUIRE(r.status == 200);
        REQUIRE(r.body["hits"].size() == 5);
        const auto& top = r.body["hits"][0];
        CHECK(top["rank"] == 1);
        CHECK(env().fx.queries[0].relevant_ids.count(top["doc_id"].get<std::string>()) == 1);
        CHECK(top.contains("lexical_score"));
    }

    TEST_CASE("request validation") {
        auto s = env().service();
        CHECK(s.search("not json").status == 400);
        CHECK(s.search(R"({"query": "  "})").status == 400);
        CHECK(s.search(R"({"query": "x", "k": 0})").status == 400);
        CHECK(s.search(R"({"query": "x", "alpha": 2})").status == 400);
        CHECK(s.answer(R"({"query": "x", "verify": "yes"})").status == 400);
        CHECK(s.answer(R"([1, 2])").status == 400);
    }

    TEST_CASE("answer handler output matches the schema") {
        auto s = env().service();
        auto r = s.answer(nlohmann::json{{"query", env().fx.queries[12].body}}.dump());
        REQUIRE(r.status == 200);
        auto errors = testing::validate_schema(schema(), r.body);
        for (const auto& e : errors) MESSAGE(e);
        CHECK(errors.empty());
        CHECK(r.body["verified"] == true);
        CHECK_FALSE(r.body["claims"].empty());
    }

    TEST_CASE("verify=false marks claims unverified") {
        auto s = env().service();
        auto r = s.answer(nlohmann::json{{"query", env().fx.queries[1].body}, {"verify", false}}.dump());
        REQUIRE(r.status == 200);
        CHECK(r.body["verified"] == false);
        for (const auto& c : r.body["claims"]) {
            CHECK(c["status"] == "Unverified");
            CHECK(c["pair_labels"].empty());
        }
        CHECK(testing::validate_schema(schema(), r.body).empty());
    }

    TEST_CASE("document lookup") {
        auto s = env().service();
        const auto& doc = env().fx.docs[3];
        auto r = s.document(doc.doc_id);
        REQUIRE(r.status == 200);
        CHECK(r.body["title"] == doc.title);
        CHECK(s.document("999").status == 404);
        CHECK(s.document("abc").status == 400);
    }

    TEST_CASE("no index means 503 and degraded health") {
        ServiceConfig c;
        Service s(c, nullptr, make_backends(c, nullptr));
        CHECK(s.search(R"({"query": "x"})").status == 503);
        CHECK(s.document("1").status == 503);
        auto h = s.health();
        CHECK(h.body["status"] == "degraded");
        CHECK(env().service().health().body["status"] == "ok");
    }

    TEST_CASE("unreachable generation backend gives 502 naming it") {
        ServiceConfig c;
        c.generation = {"openai", {"http://127.0.0.1:1/v1/chat/completions", "m", "", std::chrono::milliseconds(300)}};
        auto s = env().service(c);
        auto r = s.answer(R"({"query": "kinase"})");
        CHECK(r.status == 502);
        CHECK(r.body["backend"] == "generation");
        CHECK(s.health().body["backends"]["generation"] == "unreachable");
    }

    TEST_CASE("http server routes and CORS") {
        auto s = env().service();
        HttpServer server(s);
        const int port = server.bind("127.0.0.1", 0);
        std::thread t([&] { server.listen_after_bind(); });
        server.wait_until_ready();
        httplib::Client client("127.0.0.1", port);

        auto health = client.Get("/healthz");
        REQUIRE(health);
        CHECK(health->status == 200);
        CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");
        auto doc = client.Get(("/api/document/" + env().fx.docs[0].doc_id).c_str());
        REQUIRE(doc);
        CHECK(doc->status == 200);
        auto search = client.Post("/api/search", R"({"query": "cells"})", "application/json");
        REQUIRE(search);
        CHECK(search->status == 200);
        auto missing = client.Get("/nope");
        REQUIRE(missing);
        CHECK(missing->status == 404);
        CHECK(nlohmann::json::parse(missing->body).contains("error"));
        auto preflight = client.Options("/api/answer");
        REQUIRE(preflight);
        CHECK(preflight->status == 204);

        server.stop();
        t.join();
    }
}
