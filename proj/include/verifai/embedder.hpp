#pragma once

#include "verifai/analyzer.hpp"
#include "verifai/http_client.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace verifai {

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<float> embed(std::string_view text) const = 0;
    virtual std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) const;
};

/// Deterministic bag-of-terms embedder for desk-scale runs. Each analyzed term
/// maps to a pseudo-random unit vector seeded by a stable hash of the term,
/// blended with the vectors of its character trigrams so that morphological
/// variants land close together. Text vectors are the normalized term sum.
class HashEmbedder final : public Embedder {
public:
    struct Options {
        std::size_t dimension = 64;
        std::uint64_t seed = 0;
        /// Weight of the normalized trigram component relative to the whole-term vector.
        float subword_weight = 0.8f;
    };

    explicit HashEmbedder(Options options, AnalyzerConfig analyzer = {});

    std::string name() const override;
    std::size_t dimension() const override { return options_.dimension; }
    std::vector<float> embed(std::string_view text) const override;

    std::vector<float> term_vector(std::string_view term) const;
    const Options& options() const noexcept { return options_; }

private:
    void add_feature(std::string_view feature, float weight, std::span<float> out) const;

    Options options_;
    AnalyzerConfig analyzer_;
};

/// OpenAI-compatible embedding endpoint: POST {model, input: [texts]} ->
/// {data: [{embedding: [floats]}]}.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpBackendConfig config, std::size_t dimension);

    std::string name() const override { return "http:" + config_.model; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<float> embed(std::string_view text) const override;
    std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) const override;

private:
    HttpBackendConfig config_;
    std::size_t dimension_;
};

/// Throws when dimension < 8.
std::unique_ptr<Embedder> default_test_embedder(std::size_t dimension, std::uint64_t seed);

std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed = 0) noexcept;

void normalize_in_place(std::span<float> v) noexcept;

} // namespace verifai
