#include "verifai/lexical_index.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace verifai;

namespace {

std::vector<Document> docs(std::initializer_list<std::pair<const char*, const char*>> items) {
    std::vector<Document> out;
    for (const auto& [id, text] : items) {
        out.push_back({id, "", text, {}, {}, {}});
    }
    return out;
}

AnalyzerConfig raw() {
    AnalyzerConfig c;
    c.remove_stopwords = false;
    return c;
}

} // namespace

TEST_SUITE("lexical") {
    TEST_CASE("BM25 hand computation on two documents") {
        // d1 = "x x" (length 2), d2 = "x" (length 1), avgdl = 1.5, df(x) = 2.
        auto index = LexicalIndex::build(docs({{"1", "x x"}, {"2", "x"}}), raw());
        const double idf = std::log(1.0 + (2.0 - 2.0 + 0.5) / (2.0 + 0.5));
        const auto w = [&](double tf, double len) {
            return idf * tf * 2.2 / (tf + 1.2 * (1.0 - 0.75 + 0.75 * len / 1.5));
        };
        auto hits = index.search("x", 10).hits;
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].doc_id == "1");
        CHECK(hits[0].raw_score == doctest::Approx(w(2, 2)).epsilon(1e-12));
        CHECK(hits[1].raw_score == doctest::Approx(w(1, 1)).epsilon(1e-12));
        CHECK(index.score("x", "2") == doctest::Approx(w(1, 1)).epsilon(1e-12));
        CHECK(index.avg_doc_length() == 1.5);
    }

    TEST_CASE("ties break by numeric doc id") {
        auto index = LexicalIndex::build(docs({{"10", "alpha"}, {"9", "alpha"}, {"100", "alpha"}}), raw());
        auto hits = index.search("alpha", 10).hits;
        REQUIRE(hits.size() == 3);
        CHECK(hits[0].doc_id == "9");
        CHECK(hits[1].doc_id == "10");
        CHECK(hits[2].doc_id == "100");
    }

    TEST_CASE("k limits and unknown terms") {
        auto index = LexicalIndex::build(docs({{"1", "a b"}, {"2", "b c"}, {"3", "c d"}}), raw());
        CHECK(index.search("b c", 1).hits.size() == 1);
        CHECK(index.search("zzz", 5).hits.empty());
        CHECK(index.score("zzz", "1") == 0.0);
    }

    TEST_CASE("a stopword-only query yields no hits and a notice") {
        auto index = LexicalIndex::build(docs({{"1", "the cells"}}));
        auto outcome = index.search("the of", 5);
        CHECK(outcome.hits.empty());
        CHECK_FALSE(outcome.notices.empty());
    }

    TEST_CASE("duplicate query terms count once") {
        auto index = LexicalIndex::build(docs({{"1", "x y"}, {"2", "y"}}), raw());
        CHECK(index.score("x x", "1") == doctest::Approx(index.score("x", "1")));
    }

    TEST_CASE("duplicate document ids are rejected") {
        CHECK_THROWS(LexicalIndex::build(docs({{"1", "a"}, {"1", "b"}})));
    }

    TEST_CASE("serialization roundtrip") {
        auto index = LexicalIndex::build(docs({{"3", "gamma delta"}, {"1", "alpha beta"}, {"2", "beta gamma"}}));
        auto copy = LexicalIndex::deserialize(index.serialize());
        CHECK(copy == index);
        const auto path = std::filesystem::temp_directory_path() / "verifai_lexical_test.bin";
        index.save(path);
        auto loaded = LexicalIndex::load(path);
        std::filesystem::remove(path);
        CHECK(loaded == index);
        CHECK(loaded.search("beta", 5).hits == index.search("beta", 5).hits);
    }

    TEST_CASE("corrupt bytes are rejected") {
        auto bytes = LexicalIndex::build(docs({{"1", "a"}})).serialize();
        bytes.resize(bytes.size() / 2);
        CHECK_THROWS(LexicalIndex::deserialize(bytes));
    }
}
