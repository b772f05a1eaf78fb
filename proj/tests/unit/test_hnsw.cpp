#include "verifai/hnsw.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace verifai;

namespace {

std::vector<std::vector<float>> points(std::size_t n, std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<std::vector<float>> out(n, std::vector<float>(dim));
    for (auto& v : out) {
        float norm = 0.0f;
        for (auto& x : v) {
            x = g(rng);
            norm += x * x;
        }
        for (auto& x : v) x /= std::sqrt(norm);
    }
    return out;
}

float dot(const std::vector<float>& a, const std::vector<float>& b) {
    float s = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

HnswGraph build(const std::vector<std::vector<float>>& pts, HnswParams params = {}) {
    HnswGraph g(params);
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
        g.insert(i, [&](std::uint32_t a, std::uint32_t b) { return dot(pts[a], pts[b]); });
    }
    return g;
}

} // namespace

TEST_SUITE("hnsw") {
    TEST_CASE("empty and single-node graphs") {
        HnswGraph g;
        CHECK(g.search([](std::uint32_t) { return 0.0f; }, 5, 10).empty());
        auto pts = points(1, 8, 1);
        auto one = build(pts);
        auto hits = one.search([&](std::uint32_t n) { return dot(pts[0], pts[n]); }, 5, 10);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].second == 0);
    }

    TEST_CASE("degree bounds hold on every level") {
        auto pts = points(500, 16, 2);
        HnswParams p;
        p.m = 8;
        auto g = build(pts, p);
        for (std::uint32_t n = 0; n < g.size(); ++n) {
            for (int l = 0; l <= g.level_of(n); ++l) {
                CHECK(g.neighbors(n, l).size() <= (l == 0 ? 16u : 8u));
            }
        }
        CHECK(g.level_of(g.entry_point()) == g.max_level());
    }

    TEST_CASE("a stored point finds itself first") {
        auto pts = points(400, 16, 3);
        auto g = build(pts);
        for (std::uint32_t q = 0; q < 400; q += 37) {
            auto hits = g.search([&](std::uint32_t n) { return dot(pts[q], pts[n]); }, 3, 64);
            REQUIRE_FALSE(hits.empty());
            CHECK(hits[0].second == q);
            CHECK(std::is_sorted(hits.begin(), hits.end(), [](auto& a, auto& b) { return a.first > b.first; }));
        }
    }

    TEST_CASE("the same seed builds the same graph") {
        auto pts = points(200, 8, 4);
        auto a = build(pts);
        auto b = build(pts);
        REQUIRE(a.size() == b.size());
        for (std::uint32_t n = 0; n < a.size(); ++n) {
            REQUIRE(a.level_of(n) == b.level_of(n));
            for (int l = 0; l <= a.level_of(n); ++l) {
                auto x = a.neighbors(n, l);
                auto y = b.neighbors(n, l);
                CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
            }
        }
    }
}
