#include "verifai/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace verifai::simd {
namespace {

constexpr KernelTable kScalar{
    scalar::dot_f32, scalar::dot_f32_u8, scalar::min_max_f32, scalar::quantize_u8, scalar::sum_u8,
};

#if defined(VERIFAI_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{
    avx2::dot_f32, avx2::dot_f32_u8, avx2::min_max_f32, avx2::quantize_u8, avx2::sum_u8,
};
#endif

Isa probe() noexcept {
#if defined(VERIFAI_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return Isa::avx2;
    }
#endif
    return Isa::scalar;
}

Isa clamp_to_supported(Isa wanted) noexcept {
    return (wanted == Isa::avx2 && detected_isa() != Isa::avx2) ? Isa::scalar : wanted;
}

Isa initial_isa() noexcept {
    if (const char* env = std::getenv("VERIFAI_SIMD")) {
        std::string_view v(env);
        if (v == "scalar") {
            return Isa::scalar;
        }
        if (v == "avx2") {
            return clamp_to_supported(Isa::avx2);
        }
    }
    return detected_isa();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{&kernels(initial_isa())};
    return slot;
}

} // namespace

std::string_view to_string(Isa isa) noexcept {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

Isa detected_isa() noexcept {
    static const Isa isa = probe();
    return isa;
}

const KernelTable& kernels(Isa isa) noexcept {
#if defined(VERIFAI_HAVE_AVX2_KERNELS)
    if (clamp_to_supported(isa) == Isa::avx2) {
        return kAvx2;
    }
#else
    (void)isa;
#endif
    return kScalar;
}

Isa active_isa() noexcept {
    return active_slot().load(std::memory_order_acquire) == &kScalar ? Isa::scalar : Isa::avx2;
}

void set_active_isa(Isa isa) noexcept {
    active_slot().store(&kernels(isa), std::memory_order_release);
}

const KernelTable& active_kernels() noexcept {
    return *active_slot().load(std::memory_order_acquire);
}

} // namespace verifai::simd
