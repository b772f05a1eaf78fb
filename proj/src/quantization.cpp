#include "verifai/quantization.hpp"

#include "verifai/error.hpp"
#include "verifai/simd/kernels.hpp"

#include <cmath>
#include <limits>

namespace verifai {

QuantizationParams quantize_into(std::span<const float> v, std::span<std::uint8_t> codes) {
    if (codes.size() != v.size()) {
        throw Error(ErrorKind::internal, "quantize: code buffer size mismatch");
    }
    if (v.empty()) {
        return {};
    }
    const auto& k = simd::active_kernels();
    float lo = 0.0f;
    float hi = 0.0f;
    k.min_max_f32(v.data(), v.size(), &lo, &hi);
    QuantizationParams p;
    p.offset = lo;
    if (!(hi > lo)) {
        p.scale = 0.0f;
        std::fill(codes.begin(), codes.end(), std::uint8_t{0});
        return p;
    }
    p.scale = (hi - lo) / 255.0f;
    k.quantize_u8(v.data(), v.size(), lo, 255.0f / (hi - lo), codes.data());
    return p;
}

QuantizedVector quantize(std::span<const float> v) {
    QuantizedVector q;
    q.codes.resize(v.size());
    q.params = quantize_into(v, q.codes);
    return q;
}

std::vector<float> dequantize(const QuantizedVector& q) {
    std::vector<float> out(q.codes.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = q.params.offset + q.params.scale * static_cast<float>(q.codes[i]);
    }
    return out;
}

float max_component_error(const QuantizationParams& p, float max_abs_component) noexcept {
    constexpr float eps = std::numeric_limits<float>::epsilon();
    return 0.5f * p.scale * (1.0f + 8 * eps) + 8 * eps * (max_abs_component + std::abs(p.offset) + 255.0f * p.scale);
}

float quantized_dot(std::span<const float> q, float q_sum, std::span<const std::uint8_t> codes,
                    const QuantizationParams& p) {
    return p.offset * q_sum + p.scale * simd::dot(q, codes);
}

double quantized_dot_error_bound(std::span<const float> q, const QuantizationParams& p) {
    double l1 = 0.0;
    for (float x : q) {
        l1 += std::abs(x);
    }
    return 0.5 * static_cast<double>(p.scale) * l1;
}

} // namespace verifai
