#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace verifai {

/// Per-vector affine map: component ~= offset + scale * code.
struct QuantizationParams {
    float scale = 0.0f;
    float offset = 0.0f;

    friend bool operator==(const QuantizationParams&, const QuantizationParams&) = default;
};

struct QuantizedVector {
    std::vector<std::uint8_t> codes;
    QuantizationParams params;
};

/// scale = (max - min) / 255, offset = min, codes rounded to nearest.
QuantizationParams quantize_into(std::span<const float> v, std::span<std::uint8_t> codes);
QuantizedVector quantize(std::span<const float> v);
std::vector<float> dequantize(const QuantizedVector& q);

/// Rounding-to-nearest bound on |v[i] - dequantized[i]| (half a step, plus float slack).
float max_component_error(const QuantizationParams& p, float max_abs_component) noexcept;

/// Approximates dot(q, v) from v's codes; q_sum is sum(q).
float quantized_dot(std::span<const float> q, float q_sum, std::span<const std::uint8_t> codes,
                    const QuantizationParams& p);

/// |dot(q, v) - quantized_dot(q, ...)| <= this, up to float summation error.
double quantized_dot_error_bound(std::span<const float> q, const QuantizationParams& p);

} // namespace verifai
