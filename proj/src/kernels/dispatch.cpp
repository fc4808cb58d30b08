#include <atomic>

#include "rnr/kernels.hpp"

namespace rnr::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(RNR_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

std::atomic<Isa>& active() {
    static std::atomic<Isa> isa{detected_isa()};
    return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

Isa detected_isa() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa) {
    if (isa == Isa::Avx2 && !cpu_has_avx2()) {
        return false;
    }
    active().store(isa, std::memory_order_relaxed);
    return true;
}

#if defined(RNR_HAVE_AVX2_KERNELS)
#define RNR_DISPATCH(fn, ...) \
    (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define RNR_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void to_pcm16(std::span<const double> in, double scale, std::span<std::int16_t> out) {
    RNR_DISPATCH(to_pcm16, in, scale, out);
}

void mix_add(std::span<double> dst, std::span<const double> src, double gain) {
    RNR_DISPATCH(mix_add, dst, src, gain);
}

std::uint64_t sum_squares(std::span<const std::int16_t> in) { return RNR_DISPATCH(sum_squares, in); }

std::uint32_t peak_abs(std::span<const std::int16_t> in) { return RNR_DISPATCH(peak_abs, in); }

#undef RNR_DISPATCH

}  // namespace rnr::kernels
