#include <algorithm>
#include <cmath>

#include "rnr/kernels.hpp"

namespace rnr::kernels::scalar {

void to_pcm16(std::span<const double> in, double scale, std::span<std::int16_t> out) {
    const std::size_t n = std::min(in.size(), out.size());
    for (std::size_t i = 0; i < n; ++i) {
        double v = in[i] * scale;
        v = std::min(std::max(v, -32768.0), 32767.0);
        out[i] = static_cast<std::int16_t>(std::nearbyint(v));
    }
}

void mix_add(std::span<double> dst, std::span<const double> src, double gain) {
    const std::size_t n = std::min(dst.size(), src.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double scaled = src[i] * gain;
        dst[i] = dst[i] + scaled;
    }
}

std::uint64_t sum_squares(std::span<const std::int16_t> in) {
    std::uint64_t acc = 0;
    for (const std::int16_t s : in) {
        const auto w = static_cast<std::int64_t>(s);
        acc += static_cast<std::uint64_t>(w * w);
    }
    return acc;
}

std::uint32_t peak_abs(std::span<const std::int16_t> in) {
    std::uint32_t peak = 0;
    for (const std::int16_t s : in) {
        const auto mag = static_cast<std::uint32_t>(s < 0 ? -static_cast<std::int32_t>(s) : s);
        peak = std::max(peak, mag);
    }
    return peak;
}

}  // namespace rnr::kernels::scalar
