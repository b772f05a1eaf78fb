#pragma once

#include "verifai/document_store.hpp"
#include "verifai/embedder.hpp"
#include "verifai/lexical_index.hpp"
#include "verifai/vector_index.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <span>
#include <string>

namespace verifai {

/// How to reconstruct the embedder an index was built with.
struct EmbedderSpec {
    std::string kind = "hash";  // hash | http
    std::size_t dimension = 64;
    std::uint64_t seed = 0;
    float subword_weight = 0.8f;
    HttpBackendConfig http;

    friend bool operator==(const EmbedderSpec&, const EmbedderSpec&) = default;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec, const AnalyzerConfig& analyzer = {});
nlohmann::json to_json(const EmbedderSpec& spec);
EmbedderSpec embedder_spec_from_json(const nlohmann::json& j);

struct BundleOptions {
    std::size_t token_limit = kDefaultTokenLimit;
    EmbedderSpec embedder;
    HnswParams hnsw;
    AnalyzerConfig analyzer;
    Bm25Params bm25;
    VectorBuildOptions build;
};

/// Everything one index directory holds: manifest.json, documents.jsonl,
/// lexical.bin and vectors.bin.
class IndexBundle {
public:
    static constexpr int kManifestVersion = 1;

    /// `embedder` must produce options.embedder.dimension-sized vectors.
    static IndexBundle build(std::vector<Document> docs, const BundleOptions& options, const Embedder& embedder);

    void save(const std::filesystem::path& dir) const;
    /// Throws not_found for a missing directory or file and corrupt for a bad manifest.
    static IndexBundle load(const std::filesystem::path& dir);

    const DocumentStore& store() const noexcept { return store_; }
    const LexicalIndex& lexical() const noexcept { return lexical_; }
    const VectorIndex& vectors() const noexcept { return vectors_; }
    const BundleOptions& options() const noexcept { return options_; }
    std::size_t chunk_count() const noexcept { return vectors_.size(); }

private:
    BundleOptions options_;
    DocumentStore store_;
    LexicalIndex lexical_;
    VectorIndex vectors_;
};

} // namespace verifai
