#pragma once

#include "verifai/corpus.hpp"
#include "verifai/embedder.hpp"
#include "verifai/hnsw.hpp"
#include "verifai/mapped_file.hpp"
#include "verifai/quantization.hpp"
#include "verifai/ranking.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace verifai {

struct ChunkRef {
    std::string doc_id;
    std::uint32_t chunk_index = 0;

    friend bool operator==(const ChunkRef&, const ChunkRef&) = default;
};

struct ScoredChunk {
    std::string doc_id;
    std::uint32_t chunk_index = 0;
    double raw_score = 0.0;

    friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

/// Descending score, then (doc_id, chunk_index) ascending.
bool chunk_ranks_before(const ScoredChunk& a, const ScoredChunk& b) noexcept;

struct VectorBuildOptions {
    /// Concurrent embedder calls while building.
    std::size_t max_in_flight = 8;
    /// Texts per embed_batch call.
    std::size_t batch_size = 32;
};

struct VectorSearchOptions {
    bool rescore = true;
    /// Rescoring pool is max(k, rescore_factor * k).
    std::size_t rescore_factor = 4;
    /// Overrides the index's ef_search when set.
    std::optional<std::size_t> ef_search;
};

/// Dense ANN index over chunk embeddings. Graph traversal scores with the
/// 8-bit codes; full-precision vectors are kept for rescoring. Loaded indexes
/// map their vector sections read-only. Immutable after build or load.
class VectorIndex {
public:
    VectorIndex() = default;
    VectorIndex(VectorIndex&&) noexcept = default;
    VectorIndex& operator=(VectorIndex&&) noexcept = default;
    VectorIndex(const VectorIndex&) = delete;
    VectorIndex& operator=(const VectorIndex&) = delete;

    static VectorIndex build(std::span<const Chunk> chunks, const Embedder& embedder, HnswParams params = {},
                             const VectorBuildOptions& options = {});

    /// Index pre-computed vectors; `flat` holds refs.size() rows of `dimension` floats.
    static VectorIndex from_vectors(std::vector<ChunkRef> refs, std::span<const float> flat, std::size_t dimension,
                                    HnswParams params = {});

    std::vector<ScoredChunk> search(std::span<const float> query, std::size_t k,
                                    const VectorSearchOptions& options = {}) const;

    void save(const std::filesystem::path& path) const;
    static VectorIndex load(const std::filesystem::path& path);

    std::size_t size() const noexcept { return refs_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    const HnswParams& params() const noexcept { return graph_.params(); }
    const HnswGraph& graph() const noexcept { return graph_; }
    const std::vector<ChunkRef>& refs() const noexcept { return refs_; }
    std::span<const float> vector(std::size_t i) const { return vectors_.subspan(i * dimension_, dimension_); }
    std::span<const std::uint8_t> codes(std::size_t i) const { return codes_.subspan(i * dimension_, dimension_); }
    const QuantizationParams& quantization(std::size_t i) const { return quant_[i]; }
    bool is_memory_mapped() const noexcept { return mapped_.bytes().data() != nullptr; }

private:
    void finish_build(std::vector<float> flat);

    std::size_t dimension_ = 0;
    std::vector<ChunkRef> refs_;
    std::vector<QuantizationParams> quant_;
    std::vector<float> owned_vectors_;
    std::vector<std::uint8_t> owned_codes_;
    MappedFile mapped_;
    std::span<const float> vectors_;
    std::span<const std::uint8_t> codes_;
    HnswGraph graph_;
};

/// Document score = max over its chunk scores; descending, ties by ascending doc_id.
RankedList aggregate_to_docs(std::span<const ScoredChunk> hits);

} // namespace verifai
