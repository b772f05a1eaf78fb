#include "verifai/simd/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace verifai;

TEST_SUITE("simd") {
    TEST_CASE("dispatch reports a supported ISA") {
        const auto isa = simd::active_isa();
        CHECK((isa == simd::Isa::scalar || isa == simd::Isa::avx2));
        simd::set_active_isa(simd::Isa::scalar);
        CHECK(simd::active_isa() == simd::Isa::scalar);
        simd::set_active_isa(isa);
        CHECK(simd::active_isa() == isa);
    }

#if defined(VERIFAI_HAVE_AVX2_KERNELS)
    TEST_CASE("avx2 kernels agree with the scalar reference") {
        if (simd::detected_isa() != simd::Isa::avx2) {
            MESSAGE("CPU lacks AVX2; comparison skipped");
            return;
        }
        const auto& ref = simd::kernels(simd::Isa::scalar);
        const auto& wide = simd::kernels(simd::Isa::avx2);
        std::mt19937 rng(3);
        std::normal_distribution<float> g(0.0f, 1.0f);
        // Lengths around the vector width exercise the tail loops.
        for (std::size_t n : {1u, 7u, 8u, 9u, 15u, 16u, 31u, 33u, 64u, 100u, 257u, 1024u}) {
            std::vector<float> a(n), b(n);
            std::vector<std::uint8_t> codes(n), codes_ref(n), codes_wide(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = g(rng);
                b[i] = g(rng);
                codes[i] = static_cast<std::uint8_t>(rng() % 256);
            }
            double magnitude = 0.0;
            for (std::size_t i = 0; i < n; ++i) magnitude += std::abs(double(a[i]) * b[i]);
            const double tol = 1e-5 * (magnitude + 1.0);
            CHECK(std::abs(ref.dot_f32(a.data(), b.data(), n) - wide.dot_f32(a.data(), b.data(), n)) <= tol);

            double cmag = 0.0;
            for (std::size_t i = 0; i < n; ++i) cmag += std::abs(double(a[i])) * codes[i];
            CHECK(std::abs(ref.dot_f32_u8(a.data(), codes.data(), n) - wide.dot_f32_u8(a.data(), codes.data(), n)) <=
                  1e-5 * (cmag + 1.0));

            float lo1, hi1, lo2, hi2;
            ref.min_max_f32(a.data(), n, &lo1, &hi1);
            wide.min_max_f32(a.data(), n, &lo2, &hi2);
            CHECK(lo1 == lo2);
            CHECK(hi1 == hi2);

            const float inv = 255.0f / (hi1 - lo1 + 1e-6f);
            ref.quantize_u8(a.data(), n, lo1, inv, codes_ref.data());
            wide.quantize_u8(a.data(), n, lo1, inv, codes_wide.data());
            CHECK(codes_ref == codes_wide);

            CHECK(ref.sum_u8(codes.data(), n) == wide.sum_u8(codes.data(), n));
        }
    }
#endif

    TEST_CASE("scalar quantize rounds and clamps") {
        const float v[4] = {-1.0f, 0.0f, 0.5f, 2.0f};
        std::uint8_t codes[4];
        simd::scalar::quantize_u8(v, 4, 0.0f, 255.0f, codes);
        CHECK(codes[0] == 0);
        CHECK(codes[1] == 0);
        CHECK(codes[2] == 128);
        CHECK(codes[3] == 255);
    }
}
