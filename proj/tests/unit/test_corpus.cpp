#include "verifai/corpus.hpp"
#include "verifai/error.hpp"

#include <doctest.h>

#include <sstream>

using namespace verifai;

TEST_SUITE("corpus") {
    TEST_CASE("doc id validity and numeric order") {
        CHECK(is_valid_doc_id("0123"));
        CHECK_FALSE(is_valid_doc_id(""));
        CHECK_FALSE(is_valid_doc_id("12a"));
        CHECK(doc_id_less("2", "10"));
        CHECK_FALSE(doc_id_less("10", "2"));
        CHECK(doc_id_less("007", "7"));
        CHECK_FALSE(doc_id_less("7", "7"));
    }

    TEST_CASE("title and abstract merge") {
        Document d{"1", "A title", "Body text.", {}, {}, {}};
        CHECK(merge_title_abstract(d) == "A title. Body text.");
        d.title = "Is it true?";
        CHECK(merge_title_abstract(d) == "Is it true? Body text.");
    }

    TEST_CASE("whitespace token counter") {
        WhitespaceTokenCounter c;
        CHECK(c.count("  one two\tthree\n") == 3);
        CHECK(c.count("") == 0);
        CHECK(c.prefix_bytes("one two three", 2) == std::string("one two").size());
        CHECK(c.prefix_bytes("one two", 5) == 7);
    }

    TEST_CASE("chunking packs whole sentences under the limit") {
        WhitespaceTokenCounter c;
        auto chunks = chunk_text("5", "One two three. Four five six. Seven eight.", 6, c);
        REQUIRE(chunks.size() == 2);
        CHECK(chunks[0].text == "One two three. Four five six.");
        CHECK(chunks[1].text == "Seven eight.");
        CHECK(chunks[1].chunk_index == 1);
        for (const auto& ch : chunks) {
            CHECK(ch.token_count <= 6);
        }
    }

    TEST_CASE("an overlong sentence is hard split") {
        WhitespaceTokenCounter c;
        auto chunks = chunk_text("5", "a b c d e f g h i j.", 4, c);
        REQUIRE(chunks.size() == 3);
        for (const auto& ch : chunks) {
            CHECK(ch.token_count <= 4);
        }
    }

    TEST_CASE("ingest filters empty records and reports stats") {
        std::istringstream in(R"({"doc_id":"1","title":"T","abstract":"Some text."}

{"doc_id":"2","title":"","abstract":"  "}
{"doc_id":3,"title":"Third","abstract":"More."}
)");
        auto r = ingest(in);
        CHECK(r.documents.size() == 2);
        CHECK(r.stats.read == 3);
        CHECK(r.stats.kept == 2);
        CHECK(r.stats.dropped == 1);
        CHECK(r.documents[1].doc_id == "3");
    }

    TEST_CASE("duplicate ids abort") {
        std::istringstream in("{\"doc_id\":\"1\",\"title\":\"a\",\"abstract\":\"b\"}\n"
                              "{\"doc_id\":\"1\",\"title\":\"c\",\"abstract\":\"d\"}\n");
        CHECK_THROWS_AS(ingest(in), Error);
    }

    TEST_CASE("malformed lines abort or are skipped") {
        const std::string data = "{\"doc_id\":\"1\",\"title\":\"a\",\"abstract\":\"b\"}\nnot json\n"
                                 "{\"doc_id\":\"x1\",\"title\":\"a\",\"abstract\":\"b\"}\n";
        std::istringstream strict(data);
        CHECK_THROWS_AS(ingest(strict), Error);
        std::istringstream lenient(data);
        auto r = ingest(lenient, {true, MalformedPolicy::skip});
        CHECK(r.documents.size() == 1);
        CHECK(r.stats.malformed == 2);
        CHECK(r.warnings.size() == 2);
    }
}
