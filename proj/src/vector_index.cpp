#include "verifai/vector_index.hpp"

#include "verifai/binary_io.hpp"
#include "verifai/error.hpp"
#include "verifai/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace verifai {
namespace {

constexpr std::string_view kMagic = "VFVECIDX";
constexpr std::uint32_t kVersion = 1;

std::string chunk_name(const ChunkRef& ref) {
    return ref.doc_id + "#" + std::to_string(ref.chunk_index);
}

} // namespace

bool chunk_ranks_before(const ScoredChunk& a, const ScoredChunk& b) noexcept {
    if (a.raw_score != b.raw_score) {
        return a.raw_score > b.raw_score;
    }
    if (a.doc_id != b.doc_id) {
        return doc_id_less(a.doc_id, b.doc_id);
    }
    return a.chunk_index < b.chunk_index;
}

VectorIndex VectorIndex::build(std::span<const Chunk> chunks, const Embedder& embedder, HnswParams params,
                               const VectorBuildOptions& options) {
    const std::size_t dim = embedder.dimension();
    const std::size_t n = chunks.size();
    std::vector<float> flat(n * dim);

    const std::size_t batch = std::max<std::size_t>(options.batch_size, 1);
    const std::size_t n_batches = (n + batch - 1) / batch;
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (std::size_t b = next.fetch_add(1); b < n_batches && !failed.load(); b = next.fetch_add(1)) {
            const std::size_t lo = b * batch;
            const std::size_t hi = std::min(n, lo + batch);
            std::vector<std::string> texts;
            for (std::size_t i = lo; i < hi; ++i) {
                texts.push_back(chunks[i].text);
            }
            try {
                std::vector<std::vector<float>> vecs;
                try {
                    vecs = embedder.embed_batch(texts);
                } catch (const std::exception& e) {
                    throw Error(ErrorKind::backend, "embedding failed for chunk " +
                                                        chunk_name({chunks[lo].doc_id,
                                                                    static_cast<std::uint32_t>(chunks[lo].chunk_index)}) +
                                                        ": " + e.what());
                }
                if (vecs.size() != hi - lo) {
                    throw Error(ErrorKind::backend, "embedder returned " + std::to_string(vecs.size()) +
                                                        " vectors for " + std::to_string(hi - lo) + " texts");
                }
                for (std::size_t i = lo; i < hi; ++i) {
                    const auto& v = vecs[i - lo];
                    const ChunkRef ref{chunks[i].doc_id, static_cast<std::uint32_t>(chunks[i].chunk_index)};
                    if (v.size() != dim) {
                        throw Error(ErrorKind::backend, "embedding for chunk " + chunk_name(ref) + " has dimension " +
                                                            std::to_string(v.size()) + ", expected " +
                                                            std::to_string(dim));
                    }
                    if (!std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); })) {
                        throw Error(ErrorKind::backend, "embedding for chunk " + chunk_name(ref) + " is not finite");
                    }
                    std::copy(v.begin(), v.end(), flat.begin() + static_cast<std::ptrdiff_t>(i * dim));
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                failed.store(true);
            }
        }
    };

    const std::size_t threads = std::min(std::max<std::size_t>(options.max_in_flight, 1), n_batches);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    std::vector<ChunkRef> refs;
    refs.reserve(n);
    for (const auto& c : chunks) {
        refs.push_back({c.doc_id, static_cast<std::uint32_t>(c.chunk_index)});
    }
    return from_vectors(std::move(refs), flat, dim, params);
}

VectorIndex VectorIndex::from_vectors(std::vector<ChunkRef> refs, std::span<const float> flat, std::size_t dimension,
                                      HnswParams params) {
    if (dimension == 0) {
        throw_invalid("vector dimension must be positive");
    }
    if (flat.size() != refs.size() * dimension) {
        throw_invalid("vector buffer holds " + std::to_string(flat.size()) + " floats, expected " +
                      std::to_string(refs.size() * dimension));
    }
    VectorIndex index;
    index.dimension_ = dimension;
    index.refs_ = std::move(refs);
    index.graph_ = HnswGraph(params);
    index.finish_build(std::vector<float>(flat.begin(), flat.end()));
    return index;
}

void VectorIndex::finish_build(std::vector<float> flat) {
    const std::size_t n = refs_.size();
    owned_vectors_ = std::move(flat);
    owned_codes_.assign(n * dimension_, 0);
    quant_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<const float> v(owned_vectors_.data() + i * dimension_, dimension_);
        std::span<std::uint8_t> c(owned_codes_.data() + i * dimension_, dimension_);
        quant_[i] = quantize_into(v, c);
    }
    vectors_ = owned_vectors_;
    codes_ = owned_codes_;

    const auto& k = simd::active_kernels();
    const float* base = owned_vectors_.data();
    const std::size_t dim = dimension_;
    HnswGraph::PairSimilarity sim = [&](std::uint32_t a, std::uint32_t b) {
        return k.dot_f32(base + a * dim, base + b * dim, dim);
    };
    for (std::uint32_t i = 0; i < n; ++i) {
        graph_.insert(i, sim);
    }
}

std::vector<ScoredChunk> VectorIndex::search(std::span<const float> query, std::size_t k,
                                             const VectorSearchOptions& options) const {
    if (k == 0) {
        throw_invalid("k must be >= 1");
    }
    if (query.size() != dimension_ && !(refs_.empty() && dimension_ == 0)) {
        throw_invalid("query dimension " + std::to_string(query.size()) + " does not match index dimension " +
                      std::to_string(dimension_));
    }
    if (refs_.empty()) {
        return {};
    }
    const auto& kern = simd::active_kernels();
    const std::size_t pool = options.rescore ? std::max(k, options.rescore_factor * k) : k;
    const std::size_t ef = std::max(options.ef_search.value_or(graph_.params().ef_search), pool);

    float q_sum = 0.0f;
    for (float x : query) {
        q_sum += x;
    }
    const std::size_t dim = dimension_;
    HnswGraph::QuerySimilarity approx = [&](std::uint32_t node) {
        const auto& p = quant_[node];
        return p.offset * q_sum + p.scale * kern.dot_f32_u8(query.data(), codes_.data() + node * dim, dim);
    };
    auto found = graph_.search(approx, pool, ef);

    std::vector<ScoredChunk> out;
    out.reserve(found.size());
    for (const auto& [score, node] : found) {
        double s = score;
        if (options.rescore) {
            s = kern.dot_f32(query.data(), vectors_.data() + node * dim, dim);
        }
        out.push_back({refs_[node].doc_id, refs_[node].chunk_index, s});
    }
    std::sort(out.begin(), out.end(), chunk_ranks_before);
    if (out.size() > k) {
        out.resize(k);
    }
    return out;
}

void VectorIndex::save(const std::filesystem::path& path) const {
    binary::Writer w;
    w.put_magic(kMagic);
    w.put<std::uint32_t>(kVersion);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(dimension_));
    w.put<std::uint64_t>(refs_.size());
    const auto& p = graph_.params();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.m));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.ef_construction));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.ef_search));
    w.put<std::uint32_t>(0);
    w.put<std::uint64_t>(p.seed);
    for (const auto& r : refs_) {
        w.put_string(r.doc_id);
        w.put<std::uint32_t>(r.chunk_index);
    }
    for (const auto& q : quant_) {
        w.put<float>(q.scale);
        w.put<float>(q.offset);
    }
    w.align(64);
    w.put_array<float>(vectors_);
    w.align(64);
    w.put_array<std::uint8_t>(codes_);
    w.align(8);
    graph_.serialize(w);
    binary::write_file(path.string(), w.bytes());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    VectorIndex index;
    index.mapped_ = MappedFile(path);
    binary::Reader r(index.mapped_.bytes(), "vector index " + path.string());
    r.expect_magic(kMagic);
    if (auto v = r.get<std::uint32_t>(); v != kVersion) {
        r.fail("unsupported version " + std::to_string(v));
    }
    index.dimension_ = r.get<std::uint32_t>();
    const auto n = r.get<std::uint64_t>();
    HnswParams params;
    params.m = r.get<std::uint32_t>();
    params.ef_construction = r.get<std::uint32_t>();
    params.ef_search = r.get<std::uint32_t>();
    (void)r.get<std::uint32_t>();
    params.seed = r.get<std::uint64_t>();
    index.refs_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        ChunkRef ref;
        ref.doc_id = r.get_string();
        ref.chunk_index = r.get<std::uint32_t>();
        index.refs_.push_back(std::move(ref));
    }
    index.quant_.resize(n);
    for (auto& q : index.quant_) {
        q.scale = r.get<float>();
        q.offset = r.get<float>();
    }
    r.align(64);
    index.vectors_ = r.view<float>(n * index.dimension_);
    r.align(64);
    index.codes_ = r.view<std::uint8_t>(n * index.dimension_);
    r.align(8);
    index.graph_ = HnswGraph::deserialize(r, params);
    if (index.graph_.size() != n) {
        r.fail("graph size does not match vector count");
    }
    if (!r.at_end()) {
        r.fail("trailing bytes");
    }
    return index;
}

RankedList aggregate_to_docs(std::span<const ScoredChunk> hits) {
    std::map<std::string, double, DocIdLess> best;
    for (const auto& h : hits) {
        auto [it, inserted] = best.emplace(h.doc_id, h.raw_score);
        if (!inserted) {
            it->second = std::max(it->second, h.raw_score);
        }
    }
    RankedList out;
    out.reserve(best.size());
    for (const auto& [id, score] : best) {
        out.push_back(ScoredDoc{id, score, 0.0, ScoreSource::semantic, 0.0, 0.0});
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        return ranks_before(a.raw_score, a.doc_id, b.raw_score, b.doc_id);
    });
    return out;
}

} // namespace verifai
