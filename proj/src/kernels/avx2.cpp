// Compiled with -mavx2; only reached after dispatch confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <array>

#include "rnr/kernels.hpp"

namespace rnr::kernels::avx2 {

void to_pcm16(std::span<const double> in, double scale, std::span<std::int16_t> out) {
    const std::size_t n = std::min(in.size(), out.size());
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d lo = _mm256_set1_pd(-32768.0);
    const __m256d hi = _mm256_set1_pd(32767.0);
    constexpr int kRound = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;

    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d a = _mm256_mul_pd(_mm256_loadu_pd(in.data() + i), vscale);
        __m256d b = _mm256_mul_pd(_mm256_loadu_pd(in.data() + i + 4), vscale);
        // max first, then min: matches the scalar clamp order
        a = _mm256_min_pd(_mm256_max_pd(a, lo), hi);
        b = _mm256_min_pd(_mm256_max_pd(b, lo), hi);
        const __m128i ia = _mm256_cvtpd_epi32(_mm256_round_pd(a, kRound));
        const __m128i ib = _mm256_cvtpd_epi32(_mm256_round_pd(b, kRound));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + i), _mm_packs_epi32(ia, ib));
    }
    scalar::to_pcm16(in.subspan(i, n - i), scale, out.subspan(i, n - i));
}

void mix_add(std::span<double> dst, std::span<const double> src, double gain) {
    const std::size_t n = std::min(dst.size(), src.size());
    const __m256d vgain = _mm256_set1_pd(gain);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d scaled = _mm256_mul_pd(_mm256_loadu_pd(src.data() + i), vgain);
        _mm256_storeu_pd(dst.data() + i, _mm256_add_pd(_mm256_loadu_pd(dst.data() + i), scaled));
    }
    scalar::mix_add(dst.subspan(i, n - i), src.subspan(i, n - i), gain);
}

std::uint64_t sum_squares(std::span<const std::int16_t> in) {
    const std::size_t n = in.size();
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in.data() + i));
        // pairwise sums of squares fit in 32 unsigned bits (max 2 * 32768^2 = 2^31)
        const __m256i pairs = _mm256_madd_epi16(v, v);
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(pairs)));
        acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(pairs, 1)));
    }
    alignas(32) std::array<std::uint64_t, 4> lanes{};
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3] + scalar::sum_squares(in.subspan(i));
}

std::uint32_t peak_abs(std::span<const std::int16_t> in) {
    const std::size_t n = in.size();
    __m256i peak = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in.data() + i));
        // abs(-32768) stays 0x8000, which is 32768 when read unsigned
        peak = _mm256_max_epu16(peak, _mm256_abs_epi16(v));
    }
    alignas(32) std::array<std::uint16_t, 16> lanes{};
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), peak);
    std::uint32_t best = *std::max_element(lanes.begin(), lanes.end());
    return std::max(best, scalar::peak_abs(in.subspan(i)));
}

}  // namespace rnr::kernels::avx2
