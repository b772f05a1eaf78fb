#include "verifai/vector_index.hpp"
#include "verifai/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace verifai;

namespace {

std::vector<float> unit_rows(std::size_t n, std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<float> flat(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        float norm = 0.0f;
        for (std::size_t d = 0; d < dim; ++d) {
            flat[i * dim + d] = g(rng);
            norm += flat[i * dim + d] * flat[i * dim + d];
        }
        for (std::size_t d = 0; d < dim; ++d) flat[i * dim + d] /= std::sqrt(norm);
    }
    return flat;
}

std::vector<ChunkRef> refs(std::size_t n) {
    std::vector<ChunkRef> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({std::to_string(i / 2 + 1), static_cast<std::uint32_t>(i % 2)});
    }
    return out;
}

} // namespace

TEST_SUITE("vector_index") {
    TEST_CASE("search returns sorted hits with rescored exact scores") {
        const std::size_t dim = 32;
        auto flat = unit_rows(300, dim, 1);
        auto index = VectorIndex::from_vectors(refs(300), flat, dim);
        std::span<const float> q(flat.data() + 10 * dim, dim);
        auto hits = index.search(q, 5);
        REQUIRE(hits.size() == 5);
        CHECK(hits[0].doc_id == "6");
        CHECK(hits[0].chunk_index == 0);
        CHECK(hits[0].raw_score == doctest::Approx(1.0).epsilon(1e-5));
        CHECK(std::is_sorted(hits.begin(), hits.end(), chunk_ranks_before));
    }

    TEST_CASE("dimension mismatches are rejected") {
        auto flat = unit_rows(10, 8, 2);
        auto index = VectorIndex::from_vectors(refs(10), flat, 8);
        std::vector<float> wrong(4, 0.5f);
        CHECK_THROWS_AS(index.search(wrong, 3), Error);
        CHECK_THROWS(VectorIndex::from_vectors(refs(3), flat, 8));
    }

    TEST_CASE("save and load map the vectors and keep results") {
        const std::size_t dim = 16;
        auto flat = unit_rows(120, dim, 3);
        auto index = VectorIndex::from_vectors(refs(120), flat, dim);
        const auto path = std::filesystem::temp_directory_path() / "verifai_vectors_test.bin";
        index.save(path);
        {
            auto loaded = VectorIndex::load(path);
            CHECK(loaded.is_memory_mapped());
            CHECK(loaded.size() == 120);
            CHECK(loaded.refs() == index.refs());
            for (std::size_t qi = 0; qi < 120; qi += 17) {
                std::span<const float> q(flat.data() + qi * dim, dim);
                CHECK(loaded.search(q, 4) == index.search(q, 4));
            }
        }
        std::filesystem::resize_file(path, 40);
        CHECK_THROWS(VectorIndex::load(path));
        std::filesystem::remove(path);
    }

    TEST_CASE("chunk hits aggregate to the best chunk per document") {
        std::vector<ScoredChunk> hits{{"2", 0, 0.4}, {"1", 1, 0.9}, {"2", 1, 0.7}, {"1", 0, 0.2}, {"3", 0, 0.7}};
        auto docs = aggregate_to_docs(hits);
        REQUIRE(docs.size() == 3);
        CHECK(docs[0].doc_id == "1");
        CHECK(docs[1].doc_id == "2");
        CHECK(docs[1].raw_score == 0.7);
        CHECK(docs[2].doc_id == "3");
    }
}
