// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "verifai/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace verifai::simd::avx2 {
namespace {

inline float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 shuf = _mm_movehdup_ps(lo);
    __m128 sums = _mm_add_ps(lo, shuf);
    shuf = _mm_movehl_ps(shuf, sums);
    sums = _mm_add_ss(sums, shuf);
    return _mm_cvtss_f32(sums);
}

inline __m256 widen8(const std::uint8_t* p) {
    __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p));
    return _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(bytes));
}

} // namespace

float dot_f32(const float* a, const float* b, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i + 8), _mm256_loadu_ps(b + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc0);
    }
    float sum = hsum(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

float dot_f32_u8(const float* q, const std::uint8_t* codes, std::size_t n) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(q + i), widen8(codes + i), acc0);
        acc1 = _mm256_fmadd_ps(_mm256_loadu_ps(q + i + 8), widen8(codes + i + 8), acc1);
    }
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_ps(_mm256_loadu_ps(q + i), widen8(codes + i), acc0);
    }
    float sum = hsum(_mm256_add_ps(acc0, acc1));
    for (; i < n; ++i) {
        sum += q[i] * static_cast<float>(codes[i]);
    }
    return sum;
}

void min_max_f32(const float* v, std::size_t n, float* lo, float* hi) {
    std::size_t i = 0;
    float mn = v[0];
    float mx = v[0];
    if (n >= 8) {
        __m256 vmin = _mm256_loadu_ps(v);
        __m256 vmax = vmin;
        for (i = 8; i + 8 <= n; i += 8) {
            __m256 x = _mm256_loadu_ps(v + i);
            vmin = _mm256_min_ps(vmin, x);
            vmax = _mm256_max_ps(vmax, x);
        }
        alignas(32) float bufmin[8];
        alignas(32) float bufmax[8];
        _mm256_store_ps(bufmin, vmin);
        _mm256_store_ps(bufmax, vmax);
        mn = *std::min_element(bufmin, bufmin + 8);
        mx = *std::max_element(bufmax, bufmax + 8);
    }
    for (; i < n; ++i) {
        mn = std::min(mn, v[i]);
        mx = std::max(mx, v[i]);
    }
    *lo = mn;
    *hi = mx;
}

void quantize_u8(const float* v, std::size_t n, float offset, float inv_scale, std::uint8_t* codes) {
    const __m256 voff = _mm256_set1_ps(offset);
    const __m256 vinv = _mm256_set1_ps(inv_scale);
    const __m256 zero = _mm256_setzero_ps();
    const __m256 top = _mm256_set1_ps(255.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 x = _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(v + i), voff), vinv);
        x = _mm256_round_ps(x, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        x = _mm256_min_ps(_mm256_max_ps(x, zero), top);
        __m256i ints = _mm256_cvtps_epi32(x);
        __m128i lo = _mm256_castsi256_si128(ints);
        __m128i hi = _mm256_extracti128_si256(ints, 1);
        __m128i words = _mm_packus_epi32(lo, hi);
        __m128i bytes = _mm_packus_epi16(words, words);
        _mm_storel_epi64(reinterpret_cast<__m128i*>(codes + i), bytes);
    }
    for (; i < n; ++i) {
        float c = std::nearbyint((v[i] - offset) * inv_scale);
        codes[i] = static_cast<std::uint8_t>(std::clamp(c, 0.0f, 255.0f));
    }
}

std::uint32_t sum_u8(const std::uint8_t* codes, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(codes + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(x, zero));
    }
    alignas(32) std::uint64_t parts[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(parts), acc);
    std::uint64_t sum = parts[0] + parts[1] + parts[2] + parts[3];
    for (; i < n; ++i) {
        sum += codes[i];
    }
    return static_cast<std::uint32_t>(sum);
}

} // namespace verifai::simd::avx2
