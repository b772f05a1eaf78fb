#pragma once

#include "verifai/corpus.hpp"
#include "verifai/evaluation.hpp"
#include "verifai/index_bundle.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace verifai::fixture {

struct FixtureOptions {
    std::uint64_t seed = 7;
    std::size_t keyword_queries = 10;
    std::size_t paraphrase_queries = 10;
    std::size_t relevant_per_query = 3;
    std::size_t distractors = 160;
};

/// Synthetic abstracts and queries. Keyword queries ("kw-*") hinge on one
/// rare exact term; paraphrase queries ("pp-*") use inflections of the
/// relevant documents' topic terms that never occur verbatim in the corpus.
struct Fixture {
    std::vector<Document> docs;
    QuerySet queries;
};

Fixture make_fixture(const FixtureOptions& options = {});

/// corpus.jsonl and queries.jsonl
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

/// Embedding dimension the bundled fixture index is built with.
inline constexpr std::size_t kFixtureDimension = 256;

BundleOptions fixture_bundle_options();
IndexBundle build_fixture_index(const Fixture& fixture);

} // namespace verifai::fixture
