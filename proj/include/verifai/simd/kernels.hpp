#pragma once

// Data-parallel inner loops of the vector index. Every kernel has a scalar
// reference implementation; wider variants are selected once at startup from
// the CPU's feature bits and must agree with the reference (exactly for
// integer kernels, to rounding for float kernels).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace verifai::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Best ISA supported by this CPU and this build.
Isa detected_isa() noexcept;
/// ISA currently used by the dispatching entry points.
Isa active_isa() noexcept;
/// Route dispatch to `isa` (clamped to what is supported). Also honoured at
/// startup through VERIFAI_SIMD=scalar|avx2. Not thread-safe against
/// concurrent kernel calls; meant for tests and benchmarks.
void set_active_isa(Isa isa) noexcept;

struct KernelTable {
    float (*dot_f32)(const float* a, const float* b, std::size_t n);
    /// sum_i q[i] * codes[i]
    float (*dot_f32_u8)(const float* q, const std::uint8_t* codes, std::size_t n);
    /// min and max over v (n >= 1)
    void (*min_max_f32)(const float* v, std::size_t n, float* lo, float* hi);
    /// codes[i] = round((v[i] - offset) * inv_scale) clamped to [0, 255]
    void (*quantize_u8)(const float* v, std::size_t n, float offset, float inv_scale, std::uint8_t* codes);
    /// sum_i codes[i]
    std::uint32_t (*sum_u8)(const std::uint8_t* codes, std::size_t n);
};

const KernelTable& kernels(Isa isa) noexcept;
const KernelTable& active_kernels() noexcept;

namespace scalar {
float dot_f32(const float* a, const float* b, std::size_t n);
float dot_f32_u8(const float* q, const std::uint8_t* codes, std::size_t n);
void min_max_f32(const float* v, std::size_t n, float* lo, float* hi);
void quantize_u8(const float* v, std::size_t n, float offset, float inv_scale, std::uint8_t* codes);
std::uint32_t sum_u8(const std::uint8_t* codes, std::size_t n);
} // namespace scalar

#if defined(VERIFAI_HAVE_AVX2_KERNELS)
namespace avx2 {
float dot_f32(const float* a, const float* b, std::size_t n);
float dot_f32_u8(const float* q, const std::uint8_t* codes, std::size_t n);
void min_max_f32(const float* v, std::size_t n, float* lo, float* hi);
void quantize_u8(const float* v, std::size_t n, float offset, float inv_scale, std::uint8_t* codes);
std::uint32_t sum_u8(const std::uint8_t* codes, std::size_t n);
} // namespace avx2
#endif

inline float dot(std::span<const float> a, std::span<const float> b) {
    return active_kernels().dot_f32(a.data(), b.data(), a.size());
}

inline float dot(std::span<const float> q, std::span<const std::uint8_t> codes) {
    return active_kernels().dot_f32_u8(q.data(), codes.data(), q.size());
}

} // namespace verifai::simd
