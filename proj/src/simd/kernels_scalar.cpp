#include "verifai/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace verifai::simd::scalar {

float dot_f32(const float* a, const float* b, std::size_t n) {
    float sum = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

float dot_f32_u8(const float* q, const std::uint8_t* codes, std::size_t n) {
    float sum = 0.0f;
    for (std::size_t i = 0; i < n; ++i) {
        sum += q[i] * static_cast<float>(codes[i]);
    }
    return sum;
}

void min_max_f32(const float* v, std::size_t n, float* lo, float* hi) {
    float mn = v[0];
    float mx = v[0];
    for (std::size_t i = 1; i < n; ++i) {
        mn = std::min(mn, v[i]);
        mx = std::max(mx, v[i]);
    }
    *lo = mn;
    *hi = mx;
}

void quantize_u8(const float* v, std::size_t n, float offset, float inv_scale, std::uint8_t* codes) {
    for (std::size_t i = 0; i < n; ++i) {
        // nearbyint under the default rounding mode: ties to even, same as the vector path
        float c = std::nearbyint((v[i] - offset) * inv_scale);
        c = std::clamp(c, 0.0f, 255.0f);
        codes[i] = static_cast<std::uint8_t>(c);
    }
}

std::uint32_t sum_u8(const std::uint8_t* codes, std::size_t n) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += codes[i];
    }
    return sum;
}

} // namespace verifai::simd::scalar
