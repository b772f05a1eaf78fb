#include "verifai/index_bundle.hpp"

#include "verifai/error.hpp"

#include <fstream>

namespace verifai {

namespace fs = std::filesystem;

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec, const AnalyzerConfig& analyzer) {
    if (spec.kind == "hash") {
        HashEmbedder::Options o;
        o.dimension = spec.dimension;
        o.seed = spec.seed;
        o.subword_weight = spec.subword_weight;
        if (o.dimension < 8) {
            throw_invalid("embedding dimension must be >= 8");
        }
        return std::make_unique<HashEmbedder>(o, analyzer);
    }
    if (spec.kind == "http") {
        return std::make_unique<HttpEmbedder>(spec.http, spec.dimension);
    }
    throw_invalid("unknown embedder kind '" + spec.kind + "' (hash, http)");
}

nlohmann::json to_json(const EmbedderSpec& spec) {
    nlohmann::json j{{"kind", spec.kind}, {"dimension", spec.dimension}};
    if (spec.kind == "hash") {
        j["seed"] = spec.seed;
        j["subword_weight"] = spec.subword_weight;
    } else {
        j["url"] = spec.http.url;
        j["model"] = spec.http.model;
        j["api_key_env"] = spec.http.api_key_env;
    }
    return j;
}

EmbedderSpec embedder_spec_from_json(const nlohmann::json& j) {
    EmbedderSpec s;
    s.kind = j.value("kind", std::string("hash"));
    s.dimension = j.value("dimension", s.dimension);
    s.seed = j.value("seed", s.seed);
    s.subword_weight = j.value("subword_weight", s.subword_weight);
    s.http.url = j.value("url", std::string());
    s.http.model = j.value("model", std::string());
    s.http.api_key_env = j.value("api_key_env", std::string());
    return s;
}

IndexBundle IndexBundle::build(std::vector<Document> docs, const BundleOptions& options, const Embedder& embedder) {
    if (embedder.dimension() != options.embedder.dimension) {
        throw_invalid("embedder dimension " + std::to_string(embedder.dimension()) + " does not match spec dimension " +
                      std::to_string(options.embedder.dimension));
    }
    IndexBundle b;
    b.options_ = options;
    b.store_ = DocumentStore(std::move(docs));
    b.lexical_ = LexicalIndex::build(b.store_.documents(), options.analyzer, options.bm25);
    WhitespaceTokenCounter counter;
    std::vector<Chunk> chunks;
    for (const auto& d : b.store_.documents()) {
        auto c = chunk_document(d, options.token_limit, counter);
        chunks.insert(chunks.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
    }
    b.vectors_ = VectorIndex::build(chunks, embedder, options.hnsw, options.build);
    return b;
}

void IndexBundle::save(const fs::path& dir) const {
    fs::create_directories(dir);
    nlohmann::json manifest{
        {"version", kManifestVersion},
        {"token_limit", options_.token_limit},
        {"token_counter", "whitespace"},
        {"embedder", to_json(options_.embedder)},
        {"hnsw",
         {{"m", options_.hnsw.m},
          {"ef_construction", options_.hnsw.ef_construction},
          {"ef_search", options_.hnsw.ef_search},
          {"seed", options_.hnsw.seed}}},
        {"bm25", {{"k1", options_.bm25.k1}, {"b", options_.bm25.b}}},
        {"documents", store_.size()},
        {"chunks", vectors_.size()},
    };
    store_.save(dir / "documents.jsonl");
    lexical_.save(dir / "lexical.bin");
    vectors_.save(dir / "vectors.bin");
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out) {
        throw Error(ErrorKind::internal, "cannot write " + (dir / "manifest.json").string());
    }
}

IndexBundle IndexBundle::load(const fs::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) {
        throw Error(ErrorKind::not_found, "no index at " + dir.string() + " (missing manifest.json)");
    }
    IndexBundle b;
    try {
        auto m = nlohmann::json::parse(in);
        if (m.at("version").get<int>() != kManifestVersion) {
            throw Error(ErrorKind::corrupt, "unsupported index version " + m.at("version").dump());
        }
        b.options_.token_limit = m.at("token_limit").get<std::size_t>();
        b.options_.embedder = embedder_spec_from_json(m.at("embedder"));
        const auto& h = m.at("hnsw");
        b.options_.hnsw = {h.at("m").get<std::size_t>(), h.at("ef_construction").get<std::size_t>(),
                           h.at("ef_search").get<std::size_t>(), h.at("seed").get<std::uint64_t>()};
        if (auto bm = m.find("bm25"); bm != m.end()) {
            b.options_.bm25 = {bm->at("k1").get<double>(), bm->at("b").get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::corrupt, manifest_path.string() + ": " + e.what());
    }
    b.store_ = DocumentStore::load(dir / "documents.jsonl");
    b.lexical_ = LexicalIndex::load(dir / "lexical.bin");
    b.options_.analyzer = b.lexical_.analyzer();
    b.vectors_ = VectorIndex::load(dir / "vectors.bin");
    if (b.lexical_.doc_count() != b.store_.size()) {
        throw Error(ErrorKind::corrupt, "lexical index holds " + std::to_string(b.lexical_.doc_count()) +
                                            " documents but the store holds " + std::to_string(b.store_.size()));
    }
    if (b.vectors_.size() > 0 && b.vectors_.dimension() != b.options_.embedder.dimension) {
        throw Error(ErrorKind::corrupt, "vector dimension " + std::to_string(b.vectors_.dimension()) +
                                            " does not match manifest dimension " +
                                            std::to_string(b.options_.embedder.dimension));
    }
    return b;
}

} // namespace verifai
