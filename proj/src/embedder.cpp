#include "verifai/embedder.hpp"

#include "verifai/error.hpp"

#include <cmath>
#include <numbers>

namespace verifai {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_uniform(std::uint64_t& state) noexcept {
    // (0, 1]: never zero so the log below is finite.
    return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace

std::vector<std::vector<float>> Embedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        out.push_back(embed(t));
    }
    return out;
}

std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL ^ (seed * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

void normalize_in_place(std::span<float> v) noexcept {
    double norm = 0.0;
    for (float x : v) {
        norm += static_cast<double>(x) * x;
    }
    if (norm <= 0.0) {
        return;
    }
    const auto inv = static_cast<float>(1.0 / std::sqrt(norm));
    for (float& x : v) {
        x *= inv;
    }
}

HashEmbedder::HashEmbedder(Options options, AnalyzerConfig analyzer)
    : options_(options), analyzer_(std::move(analyzer)) {
    if (options_.dimension < 8) {
        throw_invalid("hash embedder dimension must be >= 8, got " + std::to_string(options_.dimension));
    }
}

std::string HashEmbedder::name() const {
    return "hash-" + std::to_string(options_.dimension) + "-" + std::to_string(options_.seed);
}

void HashEmbedder::add_feature(std::string_view feature, float weight, std::span<float> out) const {
    std::uint64_t state = stable_hash(feature, options_.seed);
    std::vector<float> g(out.size());
    for (std::size_t i = 0; i < g.size(); i += 2) {
        // Box-Muller: two standard normals per pair of uniforms.
        const double r = std::sqrt(-2.0 * std::log(unit_uniform(state)));
        const double theta = 2.0 * std::numbers::pi * unit_uniform(state);
        g[i] = static_cast<float>(r * std::cos(theta));
        if (i + 1 < g.size()) {
            g[i + 1] = static_cast<float>(r * std::sin(theta));
        }
    }
    normalize_in_place(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += weight * g[i];
    }
}

std::vector<float> HashEmbedder::term_vector(std::string_view term) const {
    std::vector<float> whole(options_.dimension, 0.0f);
    add_feature(term, 1.0f, whole);
    if (options_.subword_weight > 0.0f) {
        std::string padded;
        padded.reserve(term.size() + 2);
        padded.append("<").append(term).append(">");
        std::vector<float> grams(options_.dimension, 0.0f);
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
            std::string feature = "#";
            feature.append(padded, i, 3);
            add_feature(feature, 1.0f, grams);
        }
        normalize_in_place(grams);
        for (std::size_t i = 0; i < whole.size(); ++i) {
            whole[i] += options_.subword_weight * grams[i];
        }
    }
    normalize_in_place(whole);
    return whole;
}

std::vector<float> HashEmbedder::embed(std::string_view text) const {
    std::vector<float> out(options_.dimension, 0.0f);
    for (const auto& term : analyze(text, analyzer_)) {
        auto v = term_vector(term);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += v[i];
        }
    }
    normalize_in_place(out);
    return out;
}

std::unique_ptr<Embedder> default_test_embedder(std::size_t dimension, std::uint64_t seed) {
    HashEmbedder::Options options;
    options.dimension = dimension;
    options.seed = seed;
    return std::make_unique<HashEmbedder>(options);
}

HttpEmbedder::HttpEmbedder(HttpBackendConfig config, std::size_t dimension)
    : config_(std::move(config)), dimension_(dimension) {
    if (dimension_ == 0) {
        throw_invalid("embedding dimension must be positive");
    }
    parse_url(config_.url);
}

std::vector<float> HttpEmbedder::embed(std::string_view text) const {
    std::vector<std::string> one{std::string(text)};
    return std::move(embed_batch(one).front());
}

std::vector<std::vector<float>> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
    nlohmann::json body{{"model", config_.model}, {"input", texts}};
    auto response = post_json("embedding", config_, body);
    std::vector<std::vector<float>> out;
    try {
        const auto& data = response.at("data");
        if (data.size() != texts.size()) {
            throw BackendError("embedding", "expected " + std::to_string(texts.size()) + " embeddings, got " +
                                                std::to_string(data.size()));
        }
        for (const auto& item : data) {
            auto v = item.at("embedding").get<std::vector<float>>();
            if (v.size() != dimension_) {
                throw BackendError("embedding", "embedding has dimension " + std::to_string(v.size()) +
                                                    ", expected " + std::to_string(dimension_));
            }
            out.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("embedding", std::string("malformed embedding response: ") + e.what());
    }
    return out;
}

} // namespace verifai
