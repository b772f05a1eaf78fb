#pragma once

#include "verifai/binary_io.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace verifai {

struct HnswParams {
    std::size_t m = 16;
    std::size_t ef_construction = 200;
    std::size_t ef_search = 128;
    std::uint64_t seed = 42;

    friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

/// (similarity, node) pairs; higher similarity is better.
using Candidate = std::pair<float, std::uint32_t>;

/// Layered proximity graph with dot-product similarity. The graph stores
/// only topology; similarities come from caller-supplied callbacks so the
/// same graph can be traversed with full-precision or quantized scores.
class HnswGraph {
public:
    /// Similarity between two stored nodes (used while building).
    using PairSimilarity = std::function<float(std::uint32_t, std::uint32_t)>;
    /// Similarity of the query to a stored node.
    using QuerySimilarity = std::function<float(std::uint32_t)>;

    explicit HnswGraph(HnswParams params = {});

    /// Nodes must be inserted as 0, 1, 2, ... in order.
    void insert(std::uint32_t node, const PairSimilarity& sim);

    /// Top `k` of a beam search of width max(ef, k), sorted by descending similarity.
    std::vector<Candidate> search(const QuerySimilarity& sim, std::size_t k, std::size_t ef) const;

    std::size_t size() const noexcept { return links_.size(); }
    const HnswParams& params() const noexcept { return params_; }
    int max_level() const noexcept { return max_level_; }
    std::uint32_t entry_point() const noexcept { return entry_; }
    int level_of(std::uint32_t node) const { return static_cast<int>(links_[node].size()) - 1; }
    std::span<const std::uint32_t> neighbors(std::uint32_t node, int level) const;

    void serialize(binary::Writer& w) const;
    static HnswGraph deserialize(binary::Reader& r, HnswParams params);

private:
    std::size_t max_links(int level) const noexcept { return level == 0 ? 2 * params_.m : params_.m; }
    int draw_level();
    std::vector<Candidate> search_layer(const QuerySimilarity& sim, std::vector<Candidate> entry_points,
                                        std::size_t ef, int level) const;
    std::vector<std::uint32_t> select_neighbors(std::vector<Candidate> candidates, std::size_t limit,
                                                const std::function<float(std::uint32_t, std::uint32_t)>& sim) const;

    HnswParams params_;
    double level_mult_;
    std::mt19937_64 rng_;
    std::vector<std::vector<std::vector<std::uint32_t>>> links_;  // [node][level] -> neighbors
    std::uint32_t entry_ = 0;
    int max_level_ = -1;
};

} // namespace verifai
