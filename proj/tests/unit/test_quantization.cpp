#include "verifai/quantization.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace verifai;

TEST_SUITE("quantization") {
    TEST_CASE("affine parameters follow min and max") {
        const std::vector<float> v{-0.5f, 0.0f, 0.25f, 0.5f};
        auto q = quantize(v);
        CHECK(q.params.offset == -0.5f);
        CHECK(q.params.scale == doctest::Approx(1.0 / 255.0));
        CHECK(q.codes.front() == 0);
        CHECK(q.codes.back() == 255);
    }

    TEST_CASE("reconstruction error stays within the bound") {
        std::mt19937 rng(11);
        std::normal_distribution<float> g(0.0f, 1.0f);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<float> v(64);
            float max_abs = 0.0f;
            for (auto& x : v) {
                x = g(rng);
                max_abs = std::max(max_abs, std::abs(x));
            }
            auto q = quantize(v);
            auto back = dequantize(q);
            const float bound = max_component_error(q.params, max_abs);
            for (std::size_t i = 0; i < v.size(); ++i) {
                CHECK(std::abs(back[i] - v[i]) <= bound);
            }
            std::vector<float> query(64);
            float sum = 0.0f;
            double exact = 0.0;
            for (std::size_t i = 0; i < 64; ++i) {
                query[i] = g(rng);
                sum += query[i];
                exact += double(query[i]) * v[i];
            }
            const double approx = quantized_dot(query, sum, q.codes, q.params);
            CHECK(std::abs(approx - exact) <= quantized_dot_error_bound(query, q.params) + 1e-4);
        }
    }

    TEST_CASE("a constant vector roundtrips exactly") {
        const std::vector<float> v(16, 0.3f);
        auto q = quantize(v);
        CHECK(q.params.scale == 0.0f);
        for (float x : dequantize(q)) {
            CHECK(x == 0.3f);
        }
    }
}
